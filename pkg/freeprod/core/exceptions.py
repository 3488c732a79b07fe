"""Custom exceptions for freeprod.

Every exception carries the process exit code the CLI returns for it and
the HTTP status the JSON API answers with.
"""


class FreeProdException(Exception):
    def __init__(self, message="An error occurred", exit_code=1, status_code=500):
        self.message = message
        self.exit_code = exit_code
        self.status_code = status_code
        super().__init__(self.message)


class ParseException(FreeProdException):
    def __init__(self, message="Could not parse input", position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message, exit_code=3, status_code=400)


class InvalidInputException(FreeProdException):
    def __init__(self, message="Invalid input"):
        super().__init__(message, exit_code=3, status_code=400)


class PresentationMismatchException(InvalidInputException):
    def __init__(self, message="Objects belong to different presentations"):
        super().__init__(message)


class BudgetExceededException(FreeProdException):
    def __init__(self, what="search", limit=0):
        self.what = what
        self.limit = limit
        super().__init__(f"{what} budget of {limit} exceeded", exit_code=2, status_code=422)


class VerificationFailure(FreeProdException):
    def __init__(self, message="Verification failed", failures=None):
        self.failures = failures or []
        super().__init__(message, exit_code=4, status_code=500)
