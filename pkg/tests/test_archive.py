# tests/test_archive.py
import struct

import numpy as np
import pytest

from core.errors import ArchiveError, ProvenanceError
from core.pod import ReducedBasis, SnapshotMatrix, centered_pod, project
from core.sampling import latin_hypercube
from core.surrogate import Surrogate, forward, init_params
from data.archive import (
    MAGIC,
    VERSION,
    load_archive,
    pack_basis,
    pack_snapshots,
    pack_surrogate,
    save_archive,
    unpack_basis,
    unpack_snapshots,
    unpack_surrogate,
)
from tests.conftest import random_complex

HASH = "a" * 64


def test_records_round_trip(tmp_path, rng):
    records = {
        "real": rng.standard_normal((3, 2)),
        "complex": random_complex(rng, 4, 5),
        "vector": random_complex(rng, 7),
        "empty": np.zeros((6, 0), dtype=complex),
        "meta": {"L": 3, "name": "basis", "values": [1.5, 2.5]},
    }
    path = tmp_path / "a.wrom"
    save_archive(path, records, HASH)
    archive = load_archive(path, expected_hash=HASH)
    assert archive.config_hash == HASH and archive.version == VERSION
    for name in ("real", "complex", "vector", "empty"):
        np.testing.assert_array_equal(archive[name], records[name])
        assert archive[name].dtype == records[name].dtype
    assert archive["meta"] == records["meta"]
    assert not (tmp_path / "a.wrom.tmp").exists()


def test_header_and_column_major_payload(tmp_path):
    path = tmp_path / "m.wrom"
    save_archive(path, {"M": np.array([[1.0, 2.0], [3.0, 4.0]])}, "h")
    data = path.read_bytes()
    assert data[:4] == MAGIC
    assert struct.unpack("<I", data[4:8]) == (VERSION,)
    payload = np.frombuffer(data[-32:], dtype="<f8")
    np.testing.assert_array_equal(payload, [1.0, 3.0, 2.0, 4.0])


def test_same_records_give_identical_bytes(tmp_path, rng):
    records = {"x": random_complex(rng, 5, 2), "meta": {"b": 1, "a": 2}}
    save_archive(tmp_path / "1.wrom", records, HASH)
    save_archive(tmp_path / "2.wrom", records, HASH)
    assert (tmp_path / "1.wrom").read_bytes() == (tmp_path / "2.wrom").read_bytes()


def test_truncated_archive_rejected(tmp_path, rng):
    path = tmp_path / "t.wrom"
    save_archive(path, {"x": rng.standard_normal((10, 10))}, HASH)
    data = path.read_bytes()
    for cut in (2, 10, len(data) - 1):
        path.write_bytes(data[:cut])
        with pytest.raises(ArchiveError):
            load_archive(path)


def test_trailing_bytes_rejected(tmp_path):
    path = tmp_path / "t.wrom"
    save_archive(path, {"x": np.ones(3)}, HASH)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(ArchiveError):
        load_archive(path)


def test_bad_magic_and_version(tmp_path):
    path = tmp_path / "b.wrom"
    save_archive(path, {"x": np.ones(3)}, HASH)
    data = path.read_bytes()
    path.write_bytes(b"WRON" + data[4:])
    with pytest.raises(ArchiveError):
        load_archive(path)
    path.write_bytes(data[:4] + struct.pack("<I", VERSION + 1) + data[8:])
    with pytest.raises(ArchiveError):
        load_archive(path)


def test_provenance_mismatch(tmp_path):
    path = tmp_path / "p.wrom"
    save_archive(path, {"x": np.ones(3)}, HASH)
    with pytest.raises(ProvenanceError) as excinfo:
        load_archive(path, expected_hash="b" * 64)
    assert excinfo.value.found == HASH
    assert load_archive(path)["x"].shape == (3,)


def test_missing_file_and_record(tmp_path):
    with pytest.raises(ArchiveError):
        load_archive(tmp_path / "absent.wrom")
    save_archive(tmp_path / "x.wrom", {"x": np.ones(2)}, HASH)
    archive = load_archive(tmp_path / "x.wrom")
    assert "x" in archive and "y" not in archive
    with pytest.raises(ArchiveError):
        archive["y"]


def test_three_dimensional_arrays_rejected(tmp_path):
    with pytest.raises(ArchiveError):
        save_archive(tmp_path / "c.wrom", {"cube": np.zeros((2, 2, 2))}, HASH)


def test_snapshot_records_round_trip(tmp_path, rng):
    params = latin_hypercube(4, 3, seed=2)
    snapshots = SnapshotMatrix(data=random_complex(rng, 6, 4), params=params)
    save_archive(tmp_path / "s.wrom", pack_snapshots(snapshots, "train/"), HASH)
    restored = unpack_snapshots(load_archive(tmp_path / "s.wrom"), "train/")
    np.testing.assert_array_equal(restored.data, snapshots.data)
    np.testing.assert_array_equal(restored.params.points, params.points)
    assert restored.params.seed == 2
    np.testing.assert_array_equal(restored.params.regenerate().points, params.points)


def test_basis_records_round_trip(tmp_path, rng):
    basis = ReducedBasis(mean=random_complex(rng, 5), V=random_complex(rng, 5, 2),
                         singular_values=np.array([3.0, 1.0, 0.5]), centered=False)
    save_archive(tmp_path / "b.wrom", pack_basis(basis), HASH)
    restored = unpack_basis(load_archive(tmp_path / "b.wrom"))
    np.testing.assert_array_equal(restored.V, basis.V)
    np.testing.assert_array_equal(restored.mean, basis.mean)
    np.testing.assert_array_equal(restored.singular_values, basis.singular_values)
    assert restored.centered is False


def test_surrogate_records_round_trip(tmp_path, rng):
    networks = [init_params([3, 4, 2], seed=k) for k in range(2)]
    surrogate = Surrogate(networks, 2, target_mean=rng.standard_normal(4), target_scale=rng.uniform(1, 2, 4))
    save_archive(tmp_path / "n.wrom", pack_surrogate(surrogate, "L2/"), HASH)
    restored = unpack_surrogate(load_archive(tmp_path / "n.wrom"), "L2/")
    assert restored.L == 2 and len(restored.networks) == 2
    y = rng.uniform(-1, 1, size=3)
    np.testing.assert_array_equal(restored.forward(y), surrogate.forward(y))
    np.testing.assert_array_equal(forward(restored.networks[1], y), forward(networks[1], y))


def test_restored_basis_projects_bit_identically(tmp_path, rng):
    params = latin_hypercube(30, 3, seed=4)
    snapshots = SnapshotMatrix(data=np.asfortranarray(random_complex(rng, 200, 30)), params=params)
    basis = centered_pod(snapshots, L=12)
    save_archive(tmp_path / "b.wrom", pack_basis(basis), HASH)
    save_archive(tmp_path / "s.wrom", pack_snapshots(snapshots), HASH)
    restored = unpack_basis(load_archive(tmp_path / "b.wrom"))
    restored_snapshots = unpack_snapshots(load_archive(tmp_path / "s.wrom"))

    assert basis.V.flags.c_contiguous and restored.V.flags.c_contiguous
    assert snapshots.data.flags.c_contiguous and restored_snapshots.data.flags.c_contiguous
    fresh = project(snapshots.data, basis)
    np.testing.assert_array_equal(project(restored_snapshots.data, restored), fresh)
    np.testing.assert_array_equal(
        project(restored_snapshots.data, restored.truncate(5)), project(snapshots.data, basis.truncate(5))
    )
