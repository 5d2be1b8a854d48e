"""파일 해시, 경로 관리 유틸리티."""

import hashlib
from pathlib import Path

from config import UPLOAD_DIR

_CHUNK = 1 << 20


def compute_file_hash(source: bytes | str | Path) -> str:
    """바이트 또는 파일 경로의 SHA-256 해시 반환."""
    digest = hashlib.sha256()
    if isinstance(source, bytes):
        digest.update(source)
        return digest.hexdigest()
    with open(source, "rb") as f:
        while chunk := f.read(_CHUNK):
            digest.update(chunk)
    return digest.hexdigest()


def save_uploaded_file(file_bytes: bytes, filename: str, directory: Path = UPLOAD_DIR) -> Path:
    """대시보드에 올린 그래프 파일을 uploads 디렉토리에 저장.

    파일명은 내용 해시 앞 16자 + 원래 확장자. 같은 내용은 다시 쓰지 않고 기존 경로를 돌려준다.
    """
    directory.mkdir(parents=True, exist_ok=True)
    digest = compute_file_hash(file_bytes)
    dest = directory / f"{digest[:16]}{Path(filename).suffix}"
    if not dest.exists():
        dest.write_bytes(file_bytes)
    return dest
