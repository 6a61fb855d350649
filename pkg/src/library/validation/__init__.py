from library.validation import reports

__all__ = ("reports", )
