"""Regional occupational mobility network and labour market simulation engine."""

__version__ = "1.0.0"
