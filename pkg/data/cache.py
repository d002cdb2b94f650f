# data/cache.py
import logging
import threading

from core.fem import build_cube_mesh

logger = logging.getLogger(__name__)


class Cache:
    """Thread-safe in-memory cache for immutable objects such as meshes."""

    def __init__(self):
        self._cache = {}
        self._lock = threading.RLock()

    def get_or_build(self, key, builder):
        """Return the cached value for key, building it once if needed."""
        with self._lock:
            if key not in self._cache:
                logger.debug(f"Cache miss for {key}, building")
                self._cache[key] = builder()
            return self._cache[key]


# Meshes are derivable from the resolution alone
mesh_cache = Cache()


def cube_mesh(n):
    """Shared cube mesh of resolution n."""
    return mesh_cache.get_or_build(("cube", int(n)), lambda: build_cube_mesh(int(n)))
