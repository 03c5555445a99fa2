"""MacKay-Neal LDPC codes over GF(2^m) with parallel and sequential BP decoding."""
__version__ = "0.1.0"
