# data/archive.py
"""
WROM binary container for snapshots, bases and trained networks.

Layout (all integers little-endian):

    b"WROM" | version u32 | hash length u32 | config hash (utf-8) | record count u32
    record: name length u32 | name (utf-8) | kind u8 | body

    matrix/vector body: rows u64 | cols u64 | dtype u8 | column-major payload
    json body:          length u64 | canonical utf-8 JSON

Complex payloads are interleaved (re, im) f64 pairs.
"""
import json
import logging
import os
import struct
from dataclasses import dataclass, field

import numpy as np

from core.errors import ArchiveError, ProvenanceError
from core.pod import ReducedBasis, SnapshotMatrix
from core.sampling import SampleSet
from core.surrogate import MlpParams, Surrogate

logger = logging.getLogger(__name__)

MAGIC = b"WROM"
VERSION = 1

KIND_MATRIX = 0
KIND_VECTOR = 1
KIND_JSON = 2

DTYPE_F64 = 1
DTYPE_C128 = 2
_DTYPES = {DTYPE_F64: np.dtype("<f8"), DTYPE_C128: np.dtype("<c16")}


@dataclass
class Archive:
    config_hash: str
    records: dict = field(default_factory=dict)
    version: int = VERSION

    def __getitem__(self, name):
        try:
            return self.records[name]
        except KeyError:
            raise ArchiveError(f"Archive has no record '{name}'") from None

    def __contains__(self, name):
        return name in self.records


def _dtype_code(array):
    return DTYPE_C128 if np.iscomplexobj(array) else DTYPE_F64


def _encode_record(name, value):
    encoded_name = name.encode("utf-8")
    head = struct.pack("<I", len(encoded_name)) + encoded_name

    if isinstance(value, dict):
        payload = json.dumps(value, sort_keys=True, separators=(",", ":")).encode("utf-8")
        return head + struct.pack("<BQ", KIND_JSON, len(payload)) + payload

    array = np.asarray(value)
    if array.ndim == 1:
        kind, rows, cols = KIND_VECTOR, array.shape[0], 1
    elif array.ndim == 2:
        kind, (rows, cols) = KIND_MATRIX, array.shape
    else:
        raise ArchiveError(f"Record '{name}' has {array.ndim} dimensions; only vectors and matrices are stored")
    code = _dtype_code(array)
    payload = np.asarray(array, dtype=_DTYPES[code]).tobytes(order="F")
    return head + struct.pack("<BQQB", kind, rows, cols, code) + payload


def save_archive(path, records, config_hash):
    """Write records atomically; the file appears only once fully written."""
    body = [MAGIC, struct.pack("<I", VERSION)]
    encoded_hash = config_hash.encode("utf-8")
    body.append(struct.pack("<I", len(encoded_hash)) + encoded_hash)
    body.append(struct.pack("<I", len(records)))
    for name in records:
        body.append(_encode_record(name, records[name]))

    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp_path = f"{path}.tmp"
    with open(tmp_path, "wb") as handle:
        handle.write(b"".join(body))
    os.replace(tmp_path, path)
    logger.debug(f"Saved archive {path} with {len(records)} records")


class _Reader:
    def __init__(self, data, path):
        self.data = data
        self.offset = 0
        self.path = path

    def take(self, size):
        end = self.offset + size
        if end > len(self.data):
            raise ArchiveError(f"Archive {self.path} is truncated at byte {len(self.data)} (needed {end})")
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def text(self):
        (length,) = self.unpack("<I")
        try:
            return self.take(length).decode("utf-8")
        except UnicodeDecodeError as e:
            raise ArchiveError(f"Archive {self.path} holds an undecodable string: {e}") from e


def _decode_record(reader):
    name = reader.text()
    (kind,) = reader.unpack("<B")
    if kind == KIND_JSON:
        (length,) = reader.unpack("<Q")
        try:
            return name, json.loads(reader.take(length).decode("utf-8"))
        except ValueError as e:
            raise ArchiveError(f"Record '{name}' in {reader.path} is not valid JSON: {e}") from e
    if kind not in (KIND_MATRIX, KIND_VECTOR):
        raise ArchiveError(f"Record '{name}' in {reader.path} has unknown kind {kind}")

    rows, cols, code = reader.unpack("<QQB")
    if code not in _DTYPES:
        raise ArchiveError(f"Record '{name}' in {reader.path} has unknown dtype code {code}")
    dtype = _DTYPES[code]
    payload = reader.take(rows * cols * dtype.itemsize)
    array = np.frombuffer(payload, dtype=dtype).reshape((rows, cols), order="F").copy()
    return name, array[:, 0] if kind == KIND_VECTOR else array


def load_archive(path, expected_hash=None):
    """Read an archive; a hash different from expected_hash raises ProvenanceError."""
    try:
        with open(path, "rb") as handle:
            data = handle.read()
    except OSError as e:
        raise ArchiveError(f"Cannot read archive {path}: {e}") from e

    reader = _Reader(data, path)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ArchiveError(f"{path} is not a WROM archive (bad magic bytes)")
    (version,) = reader.unpack("<I")
    if version != VERSION:
        raise ArchiveError(f"Archive {path} has version {version}, expected {VERSION}")
    config_hash = reader.text()
    if expected_hash is not None and config_hash != expected_hash:
        raise ProvenanceError(
            f"Archive {path} was built under config {config_hash[:12]}, expected {expected_hash[:12]}",
            expected=expected_hash,
            found=config_hash,
        )

    (count,) = reader.unpack("<I")
    records = dict(_decode_record(reader) for _ in range(count))
    if reader.offset != len(data):
        raise ArchiveError(f"Archive {path} has {len(data) - reader.offset} trailing bytes")
    return Archive(config_hash=config_hash, records=records, version=version)


def pack_snapshots(snapshots, prefix=""):
    return {
        f"{prefix}snapshots": snapshots.data,
        f"{prefix}points": snapshots.params.points,
        f"{prefix}sampling": snapshots.params.header(),
    }


def unpack_snapshots(archive, prefix=""):
    params = SampleSet.from_header(archive[f"{prefix}sampling"], archive[f"{prefix}points"])
    return SnapshotMatrix(data=archive[f"{prefix}snapshots"], params=params, fingerprint=archive.config_hash)


def pack_basis(basis):
    return {
        "mean": basis.mean,
        "V": basis.V,
        "singular_values": basis.singular_values,
        "basis": {"centered": bool(basis.centered), "L": int(basis.L)},
    }


def unpack_basis(archive):
    V = archive["V"]
    if V.shape[1] != archive["basis"]["L"]:
        raise ArchiveError(f"Basis record has {V.shape[1]} columns, metadata says L={archive['basis']['L']}")
    return ReducedBasis(
        mean=archive["mean"].astype(np.complex128),
        V=V.astype(np.complex128),
        singular_values=archive["singular_values"],
        centered=archive["basis"]["centered"],
    )


def pack_surrogate(surrogate, prefix):
    records = {
        f"{prefix}meta": {"L": int(surrogate.L), "networks": len(surrogate.networks)},
        f"{prefix}target_mean": surrogate.target_mean,
        f"{prefix}target_scale": surrogate.target_scale,
    }
    for k, theta in enumerate(surrogate.networks):
        for layer, (W, b) in enumerate(zip(theta.weights, theta.biases)):
            records[f"{prefix}net{k}/W{layer}"] = W
            records[f"{prefix}net{k}/b{layer}"] = b
    return records


def unpack_surrogate(archive, prefix):
    meta = archive[f"{prefix}meta"]
    networks = []
    for k in range(meta["networks"]):
        weights, biases = [], []
        layer = 0
        while f"{prefix}net{k}/W{layer}" in archive:
            weights.append(archive[f"{prefix}net{k}/W{layer}"])
            biases.append(archive[f"{prefix}net{k}/b{layer}"])
            layer += 1
        networks.append(MlpParams(weights, biases))
    return Surrogate(networks, meta["L"], archive[f"{prefix}target_mean"], archive[f"{prefix}target_scale"])
