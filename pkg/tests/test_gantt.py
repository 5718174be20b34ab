from flexshop.gantt import render_svg
from flexshop.model import Instance, Machine, Operation, Schedule, validate_instance
from flexshop.timing import decode

from test_timing import lift_instance, serial_instance


def test_svg_structure():
    inst = serial_instance()
    sched = decode(inst, {1: 1, 2: 1}, {1: [1, 2]})
    svg = render_svg(inst, sched)
    assert svg.startswith('<svg xmlns="http://www.w3.org/2000/svg" version="1.1"')
    assert svg.rstrip().endswith("</svg>")
    assert "makespan 12" in svg
    assert svg.count('fill="#3366cc"') == 2  # both setups drawn
    assert ">M1<" in svg


def test_svg_is_deterministic():
    inst = serial_instance()
    sched = decode(inst, {1: 1, 2: 1}, {1: [1, 2]})
    assert render_svg(inst, sched) == render_svg(inst, sched)


def test_windows_are_drawn_after_the_bars():
    inst = lift_instance()
    sched = decode(inst, {1: 1, 2: 2}, {1: [1], 2: [2]})
    svg = render_svg(inst, sched)
    window_at = svg.index('fill="#cc3333"')
    last_bar_at = svg.rindex('stroke="#333"')
    assert window_at > last_bar_at, "the window overlay must sit on top of the bars"
    # op 2 runs 8..16 across the window [10,15]: one bar spanning both sides
    assert "makespan 16" in svg


def test_empty_schedule_shows_rows_and_windows_only():
    inst = lift_instance()
    svg = render_svg(inst, Schedule(ops={}, sequences={1: (), 2: ()}))
    assert "makespan 0" in svg
    assert ">M1<" in svg and ">M2<" in svg
    assert "hsl(" not in svg and "#3366cc" not in svg
    assert svg.count('fill="#cc3333"') == 1  # machine 2's window still shows


def test_single_op_draws_one_bar_and_one_setup():
    inst = Instance(
        num_machines=1,
        operations=(Operation(1, 1, {1: 3}),),
        arcs=(),
        machines=(Machine(1, setup_first={1: 2}, setup_between={}),))
    assert validate_instance(inst) == []
    svg = render_svg(inst, decode(inst, {1: 1}, {1: [1]}))
    assert svg.count('fill="#3366cc"') == 1
    assert svg.count("hsl(") == 1
    assert "makespan 5" in svg


def test_bar_geometry_tracks_the_time_axis():
    # horizon 16 maps to 960 px, so one time unit is 60 px from x = 70
    inst = lift_instance()
    svg = render_svg(inst, decode(inst, {1: 1, 2: 2}, {1: [1], 2: [2]}))
    assert ('<rect x="70.00" y="34.00" width="720.00" height="26.00" '
            'fill="hsl(137,62%,58%)" stroke="#333" stroke-width="0.5"/>') in svg
    assert ('<rect x="550.00" y="70.00" width="480.00" height="26.00" '
            'fill="hsl(137,62%,58%)" stroke="#333" stroke-width="0.5"/>') in svg
    assert ('<rect x="670.00" y="68.00" width="300.00" height="30.00" '
            'fill="#cc3333" fill-opacity="0.45"/>') in svg


def test_jobs_get_distinct_colors():
    inst = serial_instance()
    sched = decode(inst, {1: 1, 2: 1}, {1: [1, 2]})
    svg = render_svg(inst, sched)
    assert 'hsl(137,62%,58%)' in svg  # both ops belong to job 1
    assert svg.count('hsl(137,62%,58%)') == 2
