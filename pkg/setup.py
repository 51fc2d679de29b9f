from setuptools import setup, find_packages
import os


def get_long_description():
    with open(
        os.path.join(os.path.dirname(os.path.abspath(__file__)), "README.md"),
        encoding="utf8",
    ) as fp:
        return fp.read()


def get_version():
    path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "evmech", "version.py")
    g = {}
    with open(path) as fp:
        exec(fp.read(), g)
    return g["__version__"]


setup(
    name="evmech",
    version=get_version(),
    description="Synthesize evidence-based mechanisms and verify them by exact equilibrium enumeration",
    long_description=get_long_description(),
    long_description_content_type="text/markdown",
    license="Apache License, Version 2.0",
    packages=find_packages(exclude=("tests",)),
    python_requires=">=3.8",
    install_requires=[
        "click>=7.1.1",
        "click-default-group>=1.2.3",
        'importlib_metadata>=4.6; python_version < "3.10"',
        "pluggy>=1.0",
        "PyYAML>=5.3",
        "mergedeep>=1.1.1",
        "numpy>=1.21",
        "sympy>=1.9",
    ],
    entry_points="""
        [console_scripts]
        evmech=evmech.cli:main
    """,
    extras_require={
        "test": [
            "pytest>=5.2.2",
            "pytest-xdist>=2.2.1",
            "pytest-timeout>=1.4.2",
            "hypothesis>=6.0",
        ],
        "rich": ["rich"],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: Apache Software License",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.8",
    ],
)
