"""Shared pydantic plumbing for models that carry numpy vectors."""

from typing import Annotated, Any, Dict

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer


def _as_vector(value: Any) -> np.ndarray:
    array = np.array(value, dtype=float, copy=True)
    if array.ndim == 0:
        array = array.reshape(1)
    if array.ndim != 1:
        raise ValueError(f"expected a 1-d vector, got shape {array.shape}")
    array.setflags(write=False)
    return array


def _as_matrix(value: Any) -> np.ndarray:
    array = np.array(value, dtype=float, copy=True)
    if array.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {array.shape}")
    array.setflags(write=False)
    return array


def freeze(array: np.ndarray) -> np.ndarray:
    """Mark an array read-only and return it."""
    array.setflags(write=False)
    return array


Vector = Annotated[
    np.ndarray,
    BeforeValidator(_as_vector),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]

Matrix = Annotated[
    np.ndarray,
    BeforeValidator(_as_matrix),
    PlainSerializer(lambda a: a.tolist(), return_type=list),
]


class ArrayModel(BaseModel):
    """Immutable model whose fields may hold numpy arrays.

    Equality compares arrays element-wise instead of relying on the default
    ``__dict__`` comparison, which numpy cannot reduce to a single bool.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    def __eq__(self, other: Any) -> bool:
        if type(self) is not type(other):
            return NotImplemented
        for name in type(self).model_fields:
            mine, theirs = getattr(self, name), getattr(other, name)
            if isinstance(mine, np.ndarray) or isinstance(theirs, np.ndarray):
                if not np.array_equal(mine, theirs):
                    return False
            elif mine != theirs:
                return False
        return True

    __hash__ = None  # type: ignore[assignment]

    def payload(self) -> Dict[str, Any]:
        """JSON-ready dict."""
        return self.model_dump(mode="json")
