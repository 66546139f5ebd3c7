class SpiError(Exception):
    exit_code = 1

    def __init__(self, detail: str = "Operation failed"):
        super().__init__(detail)
        self.detail = detail


class UsageError(SpiError):
    exit_code = 1

    def __init__(self, detail: str = "Invalid command line"):
        super().__init__(detail)


class InvalidParameterError(SpiError, ValueError):
    exit_code = 1

    def __init__(self, detail: str = "Invalid parameter"):
        super().__init__(detail)


class UnidentifiableError(SpiError):
    exit_code = 2

    def __init__(self, detail: str = "Planted structure is not identifiable"):
        super().__init__(detail)


class SolveFailedError(SpiError):
    exit_code = 2

    def __init__(self, detail: str = "Solver failed"):
        super().__init__(detail)


class StorageError(SpiError):
    exit_code = 3

    def __init__(self, path, detail: str = "I/O error"):
        super().__init__(f"{path}: {detail}")
        self.path = path
