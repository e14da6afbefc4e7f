import json
import os
import tempfile
from importlib.metadata import PackageNotFoundError, version as get_version
from typing import Optional

import structlog
from pydantic import BaseModel

from pm_scheme.table_formats import from_document, to_document
from pm_scheme.tables import EigTable

logger = structlog.get_logger()


def package_version() -> str:
    try:
        return get_version("pm-scheme")
    except PackageNotFoundError:
        return "unknown"


class CacheHeader(BaseModel):
    n: int
    seed: int
    version: str
    max_oracle_n: int


class TableCache:
    """Gateway for oracle tables stored under a data directory, keyed by (n, seed, version)."""

    def __init__(self, root_path: str, version: Optional[str] = None):
        """Initialize the cache with a root path.

        Args:
            root_path: Directory holding the cached tables; created on first write
            version: Package version recorded in headers; entries from other versions are misses
        """
        self.root_path = root_path
        self.version = version or package_version()

    def path_for(self, n: int, seed: int) -> str:
        return os.path.join(self.root_path, f"table_n{n}_seed{seed}_v{self.version}.json")

    def get(self, n: int, seed: int) -> Optional[EigTable]:
        path = self.path_for(n, seed)
        if not os.path.exists(path):
            return None
        try:
            with open(path, 'r') as f:
                content = json.load(f)
            header = CacheHeader.model_validate(content["header"])
            if header.version != self.version:
                logger.warning("Cached table is from another version", path=path, cached=header.version,
                               installed=self.version)
                return None
            if header.n != n or header.seed != seed:
                logger.warning("Cached table header does not match its key", path=path)
                return None
            table = from_document(content["table"])
        except (OSError, ValueError, KeyError) as error:
            logger.warning("Ignoring unreadable cached table", path=path, error=str(error))
            return None
        logger.info("Cache hit", n=n, seed=seed)
        return table

    def put(self, table: EigTable, seed: int, max_oracle_n: int) -> str:
        """Write atomically: a temporary file in the same directory, then os.replace."""
        os.makedirs(self.root_path, exist_ok=True)
        header = CacheHeader(n=table.n, seed=seed, version=self.version, max_oracle_n=max_oracle_n)
        content = {"header": header.model_dump(), "table": to_document(table)}
        path = self.path_for(table.n, seed)
        descriptor, temporary = tempfile.mkstemp(dir=self.root_path, prefix=".table_", suffix=".json")
        try:
            with os.fdopen(descriptor, 'w') as f:
                json.dump(content, f, indent=2)
            os.replace(temporary, path)
        except BaseException:
            if os.path.exists(temporary):
                os.remove(temporary)
            raise
        logger.info("Cached table written", n=table.n, seed=seed, path=path)
        return path
