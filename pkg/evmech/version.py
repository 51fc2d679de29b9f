__version__ = "0.4a2"
__version_info__ = tuple(__version__.split("."))
