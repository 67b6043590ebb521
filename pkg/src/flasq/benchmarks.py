"""Benchmark circuit builders: 2D transverse-field Ising Trotter circuits and
small-angle rotation layers implemented directly or by Hamming weight phasing.
"""

from __future__ import annotations

import dataclasses
import enum
from collections import deque

from flasq.circuit import Circuit, CircuitBuilder, GateKind, GridCoord

DEFAULT_LAYOUT_WIDTH = 10


def zigzag_coord(index: int, width: int, ancilla: bool = False) -> GridCoord:
    """Position of the ``index``-th qubit in boustrophedon order.

    Data rows count up from 0; ancilla rows count down from -1. Each row
    starts at column 0 on even rows and at ``width - 1`` on odd rows.
    """
    if width < 1:
        raise ValueError("width must be >= 1")
    r, c = divmod(index, width)
    if r % 2:
        c = width - 1 - c
    return GridCoord(-(r + 1) if ancilla else r, c)


def zigzag_layout(n_data: int, n_ancilla: int = 0, width: int = DEFAULT_LAYOUT_WIDTH) -> dict[str, GridCoord]:
    """Zig-zag positions for data ids ``d0..`` and ancilla ids ``a0..``."""
    out = {f"d{i}": zigzag_coord(i, width) for i in range(n_data)}
    out.update({f"a{j}": zigzag_coord(j, width, ancilla=True) for j in range(n_ancilla)})
    return out


# -- transverse-field Ising model -------------------------------------------

class TrotterOrder(str, enum.Enum):
    SECOND = "second"
    FOURTH = "fourth"


class Boundary(str, enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


@dataclasses.dataclass(frozen=True)
class TfimSpec:
    """A Trotterized 2D transverse-field Ising evolution.

    Attributes:
        width: Lattice columns.
        height: Lattice rows.
        steps: Trotter steps.
        order: Product formula order.
        boundary: Open or periodic boundary conditions.
        eps_total_rotation: Synthesis error budget shared evenly by all rotations.
    """

    width: int
    height: int
    steps: int
    order: TrotterOrder = TrotterOrder.SECOND
    boundary: Boundary = Boundary.PERIODIC
    eps_total_rotation: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "order", TrotterOrder(self.order))
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if self.width < 2 or self.height < 2:
            raise ValueError("lattice dimensions must be >= 2")
        if self.steps < 1:
            raise ValueError("need at least one Trotter step")
        if not 0 < self.eps_total_rotation < 1:
            raise ValueError("eps_total_rotation must lie in (0, 1)")

    @property
    def n_sites(self) -> int:
        return self.width * self.height

    @property
    def layer_counts(self) -> tuple[int, int]:
        """Number of (field, coupling) layers after merging adjacent field layers."""
        blocks = self.steps if self.order is TrotterOrder.SECOND else 5 * self.steps
        return blocks + 1, blocks


def tfim_site(r: int, c: int) -> str:
    return f"q{r}_{c}"


def tfim_bond_groups(width: int, height: int, boundary: Boundary) -> list[list[tuple[tuple[int, int], tuple[int, int]]]]:
    """Nearest-neighbour bonds split into groups of disjoint bonds.

    Groups are: vertical bonds from even rows, from odd rows, horizontal
    bonds from even columns, from odd columns, and (only when a periodic
    dimension is odd) the wrap-around bonds that would otherwise collide.
    """
    periodic = Boundary(boundary) is Boundary.PERIODIC
    groups: list[list] = [[], [], [], [], []]
    for r in range(height):
        for c in range(width):
            if r + 1 < height or periodic:
                wrap = r + 1 == height
                g = 4 if wrap and height % 2 else r % 2
                groups[g].append(((r, c), ((r + 1) % height, c)))
    for r in range(height):
        for c in range(width):
            if c + 1 < width or periodic:
                wrap = c + 1 == width
                g = 4 if wrap and width % 2 else 2 + c % 2
                groups[g].append(((r, c), (r, (c + 1) % width)))
    return [g for g in groups if g]


def tfim_bond_count(width: int, height: int, boundary: Boundary) -> int:
    if Boundary(boundary) is Boundary.PERIODIC:
        return 2 * width * height
    return width * (height - 1) + height * (width - 1)


def tfim_rotation_count(spec: TfimSpec) -> int:
    a_layers, b_layers = spec.layer_counts
    return a_layers * spec.n_sites + b_layers * tfim_bond_count(spec.width, spec.height, spec.boundary)


def build_tfim(spec: TfimSpec) -> Circuit:
    """Trotter circuit alternating Rx field layers and CNOT-Rz-CNOT coupling layers.

    Site ``(r, c)`` sits at grid position ``(r, c)``, which is the zig-zag
    placement of the sites taken in snake order.
    """
    n_rot = tfim_rotation_count(spec)
    eps = spec.eps_total_rotation / n_rot
    order = "2nd" if spec.order is TrotterOrder.SECOND else "4th"
    b = CircuitBuilder(f"tfim_{spec.width}x{spec.height}_{order}_{spec.steps}steps_{spec.boundary.value}")
    sites = [(r, c) for r in range(spec.height) for c in range(spec.width)]
    for r, c in sites:
        b.add_qubit(tfim_site(r, c), GridCoord(r, c))
    groups = tfim_bond_groups(spec.width, spec.height, spec.boundary)

    def field_layer():
        for r, c in sites:
            b.apply(GateKind.RX, tfim_site(r, c), epsilon=eps)

    def coupling_layer():
        for group in groups:
            for u, v in group:
                lo, hi = min(u, v), max(u, v)
                b.apply(GateKind.CNOT, tfim_site(*hi), tfim_site(*lo))
                b.apply(GateKind.RZ, tfim_site(*lo), epsilon=eps)
                b.apply(GateKind.CNOT, tfim_site(*hi), tfim_site(*lo))

    a_layers, b_layers = spec.layer_counts
    for _ in range(b_layers):
        field_layer()
        coupling_layer()
    field_layer()
    assert a_layers == b_layers + 1
    return b.build()


# -- rotation layers ---------------------------------------------------------

def build_parallel_rz(n: int, eps_per_rotation: float, width: int = DEFAULT_LAYOUT_WIDTH) -> Circuit:
    """``n`` independent Rz rotations on zig-zag placed data qubits."""
    if n < 1:
        raise ValueError("need at least one rotation")
    b = CircuitBuilder(f"parallel_rz_{n}")
    for i in range(n):
        b.add_qubit(f"d{i}", zigzag_coord(i, width))
    for i in range(n):
        b.apply(GateKind.RZ, f"d{i}", epsilon=eps_per_rotation)
    return b.build()


@dataclasses.dataclass(frozen=True)
class HwpSpec:
    """Hamming weight phasing of ``n`` equal-angle rotations.

    Attributes:
        n: Number of target qubits.
        eps_per_rotation: Error budget of each of the ``n`` replaced rotations.
            The pooled budget ``n * eps_per_rotation`` is split evenly over the
            weight-register rotations.
        layout_width: Columns used by the zig-zag layout.
    """

    n: int
    eps_per_rotation: float
    layout_width: int = DEFAULT_LAYOUT_WIDTH

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("Hamming weight phasing needs n >= 2")

    @property
    def register_size(self) -> int:
        return self.n.bit_length()

    @property
    def register_epsilon(self) -> float:
        return self.n * self.eps_per_rotation / self.register_size

    @property
    def and_count(self) -> int:
        return self.n - bin(self.n).count("1")


def hamming_weight_ops(n: int) -> tuple[list[tuple], list[str]]:
    """Adder tree computing the Hamming weight of ``d0..d{n-1}``.

    Returns a list of abstract instructions and, for each bit weight ``2^i``,
    the qubit that ends up holding that bit of the weight. Instructions are
    ``("alloc", q)``, ``("cnot", control, target)`` and ``("and", a, b, out)``.
    Full adders use one AND each (the sum lands in the third input, the carry
    in a fresh ancilla); a half adder is used when exactly two bits remain.
    """
    instrs: list[tuple] = []
    level: deque[str] = deque(f"d{i}" for i in range(n))
    out_bits: list[str] = []
    carry_id = 0
    while level:
        nxt: deque[str] = deque()
        while len(level) >= 2:
            carry = f"c{carry_id}"
            carry_id += 1
            if len(level) >= 3:
                a, bq, c = level.popleft(), level.popleft(), level.popleft()
                instrs += [("cnot", c, a), ("cnot", c, bq), ("alloc", carry),
                           ("and", a, bq, carry), ("cnot", c, carry),
                           ("cnot", a, c), ("cnot", bq, c)]
                level.append(c)
            else:
                a, bq = level.popleft(), level.popleft()
                instrs += [("alloc", carry), ("and", a, bq, carry), ("cnot", a, bq)]
                level.append(bq)
            nxt.append(carry)
        out_bits.append(level.popleft())
        level = nxt
    return instrs, out_bits


def build_hwp(spec: HwpSpec) -> Circuit:
    """Hamming weight phasing circuit.

    Computes the weight of the ``n`` targets with an AND-based adder tree,
    copies each weight bit into an output ancilla, rotates bit ``i`` by
    ``2^i`` times the common angle, then uncomputes everything with
    measurement-based AND uncomputation. Ancillae are placed on negative rows
    in order of first use.
    """
    instrs, out_bits = hamming_weight_ops(spec.n)
    b = CircuitBuilder(f"hwp_{spec.n}")
    for i in range(spec.n):
        b.add_qubit(f"d{i}", zigzag_coord(i, spec.layout_width))
    n_anc = 0

    def alloc(q):
        nonlocal n_anc
        b.alloc(q, zigzag_coord(n_anc, spec.layout_width, ancilla=True))
        n_anc += 1

    def emit(ins, inverse=False):
        if ins[0] == "cnot":
            b.apply(GateKind.CNOT, ins[1], ins[2])
        elif ins[0] == "and":
            b.apply(GateKind.AND_DG if inverse else GateKind.AND, *ins[1:])
        elif ins[0] == "alloc":
            if inverse:
                b.dealloc(ins[1])
            else:
                alloc(ins[1])

    for ins in instrs:
        emit(ins)
    outputs = [f"w{i}" for i in range(len(out_bits))]
    for bit, out in zip(out_bits, outputs):
        alloc(out)
        b.apply(GateKind.CNOT, bit, out)
    for out in outputs:
        b.apply(GateKind.RZ, out, epsilon=spec.register_epsilon)
    for bit, out in zip(out_bits, outputs):
        b.apply(GateKind.CNOT, bit, out)
        b.dealloc(out)
    for ins in reversed(instrs):
        emit(ins, inverse=True)
    return b.build()
