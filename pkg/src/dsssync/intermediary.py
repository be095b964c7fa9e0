"""Intermediary encoding: every block is multiplied by its own matrix first.

User ``s`` holds ``x_s`` of length ``ell_s`` and a matrix ``A_s`` of shape
``ell_s x ell`` (square and invertible, or right-invertible when block
lengths differ).  The nodes store ``Encode(ell)(x_1 A_1, ..., x_B A_B)``.
Reconstruction undoes the base code and then applies the (right) inverse of
each ``A_s``; repair never needs the matrices.

In systematic mode the systematic nodes keep the raw blocks and only the
parity nodes see the transformed blocks.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsscore import CodeSpec, StorageTensor, _as_slices, encode_block, reconstruct_block, repair_node
from .errors import DimensionMismatch
from .matlib import StructuredMatrix, make_identity, vec_mat_mul


@dataclass(frozen=True)
class IntermediaryConfig:
    matrices: tuple[StructuredMatrix, ...]
    systematic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        widths = {m.cols for m in self.matrices}
        if len(widths) > 1:
            raise DimensionMismatch(f"matrices disagree on ell: {sorted(widths)}")
        for m in self.matrices:
            if m.rows > m.cols:
                raise DimensionMismatch(f"{m.shape} matrix cannot be right-invertible")
        if self.systematic and any(m.rows != m.cols for m in self.matrices):
            raise DimensionMismatch("systematic mode needs square matrices")

    @property
    def ell(self) -> int:
        return self.matrices[0].cols

    @property
    def lengths(self) -> tuple[int, ...]:
        return tuple(m.rows for m in self.matrices)

    def replace(self, s: int, m: StructuredMatrix) -> "IntermediaryConfig":
        mats = list(self.matrices)
        mats[s] = m
        return IntermediaryConfig(tuple(mats), self.systematic)


def identity_config(spec: CodeSpec, ell: int, systematic: bool = False) -> IntermediaryConfig:
    return IntermediaryConfig(tuple(make_identity(spec.field, ell) for _ in range(spec.B)), systematic)


def transform_blocks(config: IntermediaryConfig, blocks) -> np.ndarray:
    """The ``B x ell`` array of ``x_s A_s``."""
    if len(blocks) != len(config.matrices):
        raise DimensionMismatch(f"{len(blocks)} blocks for {len(config.matrices)} matrices")
    ys = []
    for x, a in zip(blocks, config.matrices):
        if len(x) != a.rows:
            raise DimensionMismatch(f"block of length {len(x)} vs matrix {a.shape}")
        ys.append(vec_mat_mul(x, a))
    return np.array(ys, dtype=np.int64).reshape(len(ys), config.ell)


def encode_star(spec: CodeSpec, config: IntermediaryConfig, blocks) -> StorageTensor:
    tensor = encode_block(spec, transform_blocks(config, blocks))
    if config.systematic:
        for t in spec.systematic_nodes:
            tensor.C[t, 0, :] = spec.field.array(blocks[t])
    return tensor


def _preprocess(spec: CodeSpec, config: IntermediaryConfig, T, slices) -> np.ndarray:
    s = _as_slices(spec, slices, len(T)).copy()
    if config.systematic:
        sys_nodes = set(spec.systematic_nodes)
        for j, t in enumerate(T):
            if t in sys_nodes:
                s[j, 0] = vec_mat_mul(s[j, 0], config.matrices[t])
    return s


def reconstruct_star(spec: CodeSpec, config: IntermediaryConfig, T, slices) -> list[np.ndarray]:
    y = reconstruct_block(spec, T, _preprocess(spec, config, T, slices))
    return [vec_mat_mul(y[s], a.inverse_or_right_inverse) for s, a in enumerate(config.matrices)]


def repair_star(spec: CodeSpec, config: IntermediaryConfig, t: int, T, slices) -> np.ndarray:
    out = repair_node(spec, t, T, _preprocess(spec, config, T, slices))
    if config.systematic and t in spec.systematic_nodes:
        out[0] = vec_mat_mul(out[0], config.matrices[t].inverse_or_right_inverse)
    return out
