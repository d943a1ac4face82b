"""Isomorphism of colorings via labeled line graphs.

Two colorings are isomorphic when c2 = τ ∘ c1 ∘ σ for a relabeling σ of the
points and τ either the identity or the R <-> G swap (exchanging views 2 and
3). The line graph of a coloring has the non-white pairs as vertices, labeled
by color, adjacent when they share a point. By Whitney's theorem a labeled
line-graph isomorphism between connected components is induced by a colored
graph isomorphism as soon as the components span more than four points; the
remaining small components (including the K3 / K1,3 pair) are compared as
colored graphs directly.
"""

from collections import defaultdict
from itertools import permutations

import networkx as nx
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match

from src.errors import TooLarge
from src.taxonomy.coloring import Color, Coloring

BRUTE_FORCE_LIMIT = 7
WHITNEY_MIN_POINTS = 5

_node_match = categorical_node_match("color", None)
_edge_match = categorical_edge_match("color", None)


def colored_graph(c: Coloring) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(c.n_points))
    for (p, q), color in c.items():
        if color is not Color.W:
            graph.add_edge(p, q, color=color.value)
    return graph


def _labeled_line_graph(graph: nx.Graph) -> nx.Graph:
    lg = nx.Graph()
    for p, q, data in graph.edges(data=True):
        lg.add_node((min(p, q), max(p, q)), color=data["color"])
    for vertex in graph.nodes:
        incident = [(min(vertex, w), max(vertex, w)) for w in graph.neighbors(vertex)]
        for a in range(len(incident)):
            for b in range(a + 1, len(incident)):
                lg.add_edge(incident[a], incident[b])
    return lg


def line_graph(c: Coloring) -> nx.Graph:
    """Labeled line graph L(c); vertices are sorted point pairs."""
    return _labeled_line_graph(colored_graph(c))


def _components(c: Coloring) -> list[tuple[int, nx.Graph, nx.Graph]]:
    """(point count, colored component, labeled line graph) for each non-trivial component."""
    graph = colored_graph(c)
    parts = []
    for nodes in nx.connected_components(graph):
        if len(nodes) < 2:
            continue
        sub = graph.subgraph(nodes).copy()
        parts.append((len(nodes), sub, _labeled_line_graph(sub)))
    return parts


def _components_match(first, second) -> bool:
    points_a, graph_a, lg_a = first
    points_b, graph_b, lg_b = second
    if points_a != points_b or graph_a.number_of_edges() != graph_b.number_of_edges():
        return False
    if points_a < WHITNEY_MIN_POINTS:
        return nx.is_isomorphic(graph_a, graph_b, edge_match=_edge_match)
    return nx.is_isomorphic(lg_a, lg_b, node_match=_node_match)


def _line_graphs_match(c1: Coloring, c2: Coloring) -> bool:
    parts_a, parts_b = _components(c1), _components(c2)
    if len(parts_a) != len(parts_b):
        return False
    unmatched = list(parts_b)
    for part in parts_a:
        for k, other in enumerate(unmatched):
            if _components_match(part, other):
                del unmatched[k]
                break
        else:
            return False
    return True


def _raw_fingerprint(c: Coloring) -> tuple:
    degrees = [[0, 0, 0, 0] for _ in range(c.n_points)]
    slot = {Color.B: 0, Color.R: 1, Color.G: 2, Color.W: 3}
    for (p, q), color in c.items():
        degrees[p][slot[color]] += 1
        degrees[q][slot[color]] += 1
    counts = tuple(c.count(color) for color in Color)
    return (c.n_points, counts, tuple(sorted(tuple(d) for d in degrees)))


def fingerprint(c: Coloring) -> tuple:
    """Invariant of the isomorphism class: color counts and per-point color degrees."""
    return min(_raw_fingerprint(c), _raw_fingerprint(c.swap_views()))


def isomorphic(c1: Coloring, c2: Coloring) -> bool:
    if c1.n_points != c2.n_points or fingerprint(c1) != fingerprint(c2):
        return False
    if _line_graphs_match(c1, c2):
        return True
    swapped = c2.swap_views()
    return swapped != c2 and _line_graphs_match(c1, swapped)


def brute_force_isomorphic(c1: Coloring, c2: Coloring) -> bool:
    if c1.n_points != c2.n_points:
        return False
    if c1.n_points > BRUTE_FORCE_LIMIT:
        raise TooLarge(f"brute force is limited to {BRUTE_FORCE_LIMIT} points")
    if sorted(c1.colors) != sorted(c2.colors) and sorted(c1.colors) != sorted(
        c2.swap_views().colors
    ):
        return False
    targets = {c2, c2.swap_views()}
    for sigma in permutations(range(c1.n_points)):
        if c1.relabel(sigma) in targets:
            return True
    return False


def classify(colorings: list[Coloring]) -> list[list[int]]:
    """Partition colorings into isomorphism classes, as index lists led by the representative."""
    buckets: dict[tuple, list[int]] = defaultdict(list)
    for i, c in enumerate(colorings):
        buckets[fingerprint(c)].append(i)

    classes = []
    for key in sorted(buckets):
        reps: list[list[int]] = []
        for i in buckets[key]:
            for members in reps:
                if isomorphic(colorings[members[0]], colorings[i]):
                    members.append(i)
                    break
            else:
                reps.append([i])
        classes.extend(reps)
    return classes
