"""Synchronizing edits to data blocks held in coded distributed storage."""

from .dsscore import CodeSpec, make_rs_systematic, make_single_parity
from .gf import FieldSpec, make_field
from .intermediary import IntermediaryConfig, encode_star, reconstruct_star, repair_star
from .schemes import StorageState, deletion, insertion

__all__ = [
    "CodeSpec", "FieldSpec", "IntermediaryConfig", "StorageState",
    "deletion", "encode_star", "insertion", "make_field", "make_rs_systematic",
    "make_single_parity", "reconstruct_star", "repair_star",
]
