"""广义极化码（GP码）与带擦除的逐次消除译码工具包"""

__version__ = "0.1.0"
