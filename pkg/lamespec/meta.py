import inspect
import threading
from abc import ABCMeta
from typing import Any, Dict, Hashable, Tuple


class SingletoneMeta(ABCMeta):
    """
    Metaclass for the singletone pattern, one instance per class and geometry.

    Call arguments are bound to the `__init__` signature with defaults applied, so `Ellipse(1.5)`
    and `Ellipse(a=1.5)` share their instance and its mesh cache.
    """

    _instances: Dict[Tuple[type, Hashable], Any] = {}
    _lock = threading.RLock()

    def _instance_key(cls, args: tuple, kwargs: dict) -> Tuple[type, Hashable]:
        bound = inspect.signature(cls.__init__).bind(None, *args, **kwargs)
        bound.apply_defaults()
        arguments = tuple(bound.arguments.items())[1:]
        return cls, arguments

    def __call__(cls, *args, **kwargs):
        key = cls._instance_key(args, kwargs)
        with SingletoneMeta._lock:
            if key not in SingletoneMeta._instances:
                SingletoneMeta._instances[key] = super().__call__(*args, **kwargs)
            return SingletoneMeta._instances[key]

    @classmethod
    def reset(mcs) -> None:
        """Forget every instance."""
        with mcs._lock:
            mcs._instances.clear()
