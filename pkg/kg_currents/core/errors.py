from kg_currents.core.constants import EXIT_DOCUMENT, EXIT_TOLERANCE, EXIT_USAGE


class ParameterError(ValueError):
    """参数不满足前置条件"""

    def __init__(self, message: str = "参数不合法", exit_code: int = EXIT_USAGE):
        self.exit_code = exit_code
        super().__init__(message)


class LatticeMismatchError(ValueError):
    """格点 / 质量 / 时间不一致"""

    def __init__(self, message: str = "lattice mismatch", exit_code: int = EXIT_USAGE):
        self.exit_code = exit_code
        super().__init__(message)


class AliasingError(ValueError):
    """模式超出 Nyquist 或不在盒子格点上"""

    def __init__(self, message: str = "mode not representable on lattice", index: int | None = None):
        self.exit_code = EXIT_USAGE
        self.index = index
        if index is not None:
            super().__init__(f"{message}: n={index}")
        else:
            super().__init__(message)


class BoundarySupportError(ValueError):
    """态在边界附近不可忽略"""

    def __init__(self, message: str = "state is not boundary-clear", ratio: float = 0.0):
        self.exit_code = EXIT_USAGE
        self.ratio = ratio
        super().__init__(f"{message}: boundary/max={ratio:.3e}" if ratio else message)


class QuadratureError(RuntimeError):
    """数值积分未收敛"""

    def __init__(self, message: str = "quadrature did not converge", error: float = 0.0, tolerance: float = 0.0):
        self.exit_code = EXIT_TOLERANCE
        self.error = error
        self.tolerance = tolerance
        if tolerance:
            super().__init__(f"{message}: err={error:.3e} tol={tolerance:.3e}")
        else:
            super().__init__(message)


class SpectrumError(RuntimeError):
    """算符谱异常"""

    def __init__(self, message: str = "operator spectrum check failed", exit_code: int = EXIT_USAGE):
        self.exit_code = exit_code
        super().__init__(message)


class DocumentError(ValueError):
    """输入文档格式错误"""

    def __init__(self, message: str = "malformed document", path: str = ""):
        self.exit_code = EXIT_DOCUMENT
        self.path = path
        super().__init__(f"{message}: path={path}" if path else message)


class UsageError(ValueError):
    """命令行用法错误"""

    def __init__(self, message: str = "usage error"):
        self.exit_code = EXIT_USAGE
        super().__init__(message)


class RationalityUndeclaredError(ParameterError):
    """未声明 a 的有理性"""

    def __init__(self):
        super().__init__("rationality of a must be declared (RationalParam or IrrationalParam)")
