"""
Canonical text form of theory documents; parsing the output gives back
an equal document.
"""
from jetbrane.dsl.parser import TheoryDocument
from jetbrane.kernel import Expr, SpaceSpec, render_expr
from jetbrane.kernel.render import render_multi_index


def _block(
    keyword: str, name: str, entries: dict[str, Expr], space: SpaceSpec
) -> list[str]:
    lines = [f"{keyword} {name} {{"]
    for label, value in entries.items():
        lines.append(f"  {label} = {render_expr(value, space)}")
    lines.append("}")
    return lines


def render_document(doc: TheoryDocument) -> str:
    T = doc.theory
    space = T.space
    lines = [f"space dim={space.dim} coords={','.join(space.coord_names)}"]
    if T.fields:
        lines.append("field " + " ".join(T.fields))
    if T.gauge_params:
        lines.append("param " + " ".join(T.gauge_params))
    lines.append(f"lagrangian {render_expr(T.lagrangian, space)}")
    for (i, alpha, mu), value in sorted(T.generators.items()):
        lines.append(
            f"generator {i} {alpha} [{render_multi_index(mu, space)}] = "
            f"{render_expr(value, space)}"
        )
    if T.structure is not None:
        if T.structure.is_zero():
            lines.append("structure abelian")
        for (g, a, b, mu, nu), value in T.structure.items():
            lines.append(
                f"structure {g} {a} {b} [{render_multi_index(mu, space)}] "
                f"[{render_multi_index(nu, space)}] = "
                f"{render_expr(value, space)}"
            )
    for name, solution in sorted(T.named_solutions.items()):
        lines.extend(_block("solution", name, dict(solution), space))
    for name, Q in doc.symmetries.items():
        lines.extend(_block("symmetry", name, dict(Q.characteristics), space))
    for name, f in doc.gauges.items():
        lines.extend(_block("gauge", name, dict(f.components), space))
    for name, j in doc.currents.items():
        entries = {space.coord_names[mu]: value for mu, value in j.items()}
        lines.extend(_block("current", name, entries, space))
    return "\n".join(lines) + "\n"
