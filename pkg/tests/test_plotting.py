from svis.dynamic import build_state
from svis.plotting import plot_partition_layout, plot_relation_system


def test_figures_are_written(base8, tmp_path):
    s = build_state(base8)
    a = plot_relation_system(s.image, tmp_path / "sub" / "image.png", "image")
    b = plot_partition_layout({"a1": s.partition_of("a1"), "joint": s.joint}, tmp_path / "p.png")
    for p in (a, b):
        assert p.exists() and p.read_bytes()[:4] == b"\x89PNG"


def test_figure_output_is_deterministic(base8, tmp_path):
    s = build_state(base8)
    one = plot_relation_system(s.source_system(), tmp_path / "1.png").read_bytes()
    two = plot_relation_system(s.source_system(), tmp_path / "2.png").read_bytes()
    assert one == two
