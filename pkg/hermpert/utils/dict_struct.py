from typing import Any, Dict

import numpy as np
from msgspec import Struct


class DictStruct(Struct, frozen=True):
    def to_dict(self) -> Dict[str, Any]:
        return {f: getattr(self, f) for f in self.__struct_fields__}

    @property
    def __dict__(self):
        return self.to_dict()


class ArrayStruct(DictStruct, frozen=True, eq=False):
    """Base for structs holding numpy arrays; compared by identity."""


def frozen_array(values, dtype=None) -> np.ndarray:
    """Returns a read-only copy of ``values``."""
    out = np.array(values, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out
