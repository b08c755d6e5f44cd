"""
qcpu/export.py

Deterministic drawings of QCPU networks, as plain text or a Graphviz digraph.

Nodes run left to right in application order: one node per factor labeled
(m, n, coeff), one node per connector labeled C or C†. A composed network also
gets a dashed bypass edge for its identity term. DOT ids are `f_<m>_<n>` for
the factors of a single network, `b<j>_f_<m>_<n>` inside the j-th Q-block of a
composed one, and `conn_<i>` for connectors.
"""

from __future__ import annotations

from typing import Literal, Union

from operators.errors import UnknownFormatError
from qcpu.composition import ComposedNetwork, ScalableNetwork, TraceStep
from qcpu.network import QcpuFactor, QcpuNetwork

ExportFormat = Literal["text", "dot"]
Exportable = Union[QcpuNetwork, ComposedNetwork, ScalableNetwork]

FORMATS = ("text", "dot")


def format_coeff(c: complex) -> str:
    c = complex(c)
    re = 0.0 if c.real == 0 else c.real
    im = 0.0 if c.imag == 0 else c.imag
    if im == 0.0:
        return f"{re:.6g}"
    if re == 0.0:
        return f"{im:.6g}i"
    return f"{re:.6g}{im:+.6g}i"


def _factor_label(f: QcpuFactor) -> str:
    return f"({f.m}, {f.n}, {format_coeff(f.coeff)})"


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_network(network: Exportable, format: str = "text") -> str:
    if format not in FORMATS:
        raise UnknownFormatError(f"Unknown export format '{format}' (choose from {', '.join(FORMATS)})")
    if isinstance(network, QcpuNetwork):
        return _text_single(network) if format == "text" else _dot_single(network)
    if isinstance(network, (ComposedNetwork, ScalableNetwork)):
        return _text_composed(network) if format == "text" else _dot_composed(network)
    raise TypeError(f"Cannot export {type(network).__name__}")


# ─── text ────────────────────────────────────────────────────────────────────

def _text_single(net: QcpuNetwork) -> str:
    lines = [f"network Q({net.label or 'U'}) register_dim={net.register_dim} factors={len(net.factors)}"]
    lines += [f"factor {f.node_id} {_factor_label(f)}" for f in net.factors]
    return "\n".join(lines) + "\n"


def _text_composed(net: Union[ComposedNetwork, ScalableNetwork]) -> str:
    kind = "scalable" if isinstance(net, ScalableNetwork) else "composed"
    header = f"{kind} {net.label or 'U'} register_dim={net.register_dim} steps={len(net.construction_trace)}"
    if isinstance(net, ScalableNetwork):
        header += f" input_dim={net.input_dim}"
    lines = [header]
    conn = 0
    for step in net.construction_trace:
        if step.kind == "connector":
            lines.append(f"connector conn_{conn} {step.label}")
            conn += 1
        elif step.kind == "qcpu":
            lines.append(f"block {step.label} factors={len(step.network.factors)}")
            lines += [f"  factor {f.node_id} {_factor_label(f)}" for f in step.network.factors]
        else:
            lines.append(f"bypass {step.label}")
    return "\n".join(lines) + "\n"


# ─── dot ─────────────────────────────────────────────────────────────────────

def _dot_header(name: str) -> list[str]:
    return [
        f"digraph {_quote(name)} {{",
        "  rankdir=LR;",
        '  node [fontname="Helvetica"];',
        '  input [shape=point, label=""];',
        '  output [shape=doublecircle, label="out"];',
    ]


def _dot_factor_nodes(factors: tuple[QcpuFactor, ...], prefix: str, indent: str) -> list[str]:
    return [
        f"{indent}{prefix}{f.node_id} [shape=box, label={_quote(_factor_label(f))}];"
        for f in factors
    ]


def _dot_single(net: QcpuNetwork) -> str:
    lines = _dot_header(f"Q({net.label or 'U'})")
    lines += _dot_factor_nodes(net.factors, "", "  ")
    ids = ["input"] + [f.node_id for f in net.factors] + ["output"]
    lines += [f"  {a} -> {b};" for a, b in zip(ids, ids[1:])]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_composed(net: Union[ComposedNetwork, ScalableNetwork]) -> str:
    lines = _dot_header(net.label or "U")
    chain: list[tuple[str, str]] = []  # (first id, last id) per step
    conn = 0
    block = 0
    bypass: list[TraceStep] = []
    for step in net.construction_trace:
        if step.kind == "connector":
            node = f"conn_{conn}"
            conn += 1
            lines.append(f"  {node} [shape=circle, label={_quote(step.label)}];")
            chain.append((node, node))
        elif step.kind == "qcpu":
            block += 1
            prefix = f"b{block}_"
            lines.append(f"  subgraph cluster_b{block} {{")
            lines.append(f"    label={_quote(step.label)};")
            factors = step.network.factors
            if factors:
                lines += _dot_factor_nodes(factors, prefix, "    ")
                ids = [prefix + f.node_id for f in factors]
                lines += [f"    {a} -> {b};" for a, b in zip(ids, ids[1:])]
                chain.append((ids[0], ids[-1]))
            else:
                node = f"b{block}_identity"
                lines.append(f'    {node} [shape=box, label="I"];')
                chain.append((node, node))
            lines.append("  }")
        else:
            bypass.append(step)

    previous = "input"
    for first, last in chain:
        lines.append(f"  {previous} -> {first};")
        previous = last
    lines.append(f"  {previous} -> output;")
    for step in bypass:
        lines.append(f"  input -> output [style=dashed, label={_quote(step.label)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
