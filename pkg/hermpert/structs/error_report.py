from typing import Optional

from hermpert.utils.dict_struct import DictStruct


class ErrorReport(DictStruct, frozen=True):
    code: str
    message: str
    details: Optional[str] = None
    block: Optional[int] = None
    line: Optional[int] = None
    column: Optional[int] = None
    value: Optional[float] = None
