"""예외 계층: 입력 오류는 ValueError, 실행 중 프로토콜 오류는 RuntimeError 계열."""


class GreediRISError(Exception):
    """패키지가 발생시키는 모든 예외의 공통 부모."""


# ── 입력/파라미터 ──

class ParseError(GreediRISError, ValueError):
    """엣지 리스트·바이너리 캐시 해석 실패."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"{line}행: {message}"
        super().__init__(message)


class EmptyGraphError(GreediRISError, ValueError):
    pass


class ParameterError(GreediRISError, ValueError):
    pass


class ConfigurationError(GreediRISError, ValueError):
    pass


class IntegrityError(GreediRISError, ValueError):
    """샘플 id 중복 등 데이터 일관성 위반."""


class RefusalError(GreediRISError, ValueError):
    """전수 탐색 한도를 넘는 입력."""


# ── 실행 상태/프로토콜 ──

class ModelStateError(GreediRISError, RuntimeError):
    """그래프가 요청한 확산 모델용으로 준비되지 않음."""


class TransportError(GreediRISError, RuntimeError):
    pass


class ProtocolError(GreediRISError, RuntimeError):
    def __init__(self, message: str, rank: int | None = None):
        self.rank = rank
        if rank is not None:
            message = f"rank {rank}: {message}"
        super().__init__(message)
