"""
Hypothesis strategies for random small matroids and graphs.
"""

from fractions import Fraction

from hypothesis import strategies as st

from matroids.core import direct_sum, dual, graphic, truncation, uniform


@st.composite
def multigraphs(draw, max_vertices: int = 5, max_edges: int = 8, connected: bool = False):
    """
    Random loopless multigraph as an edge list over vertices 0..n-1.

    With ``connected`` a random spanning tree is laid down first.
    """
    n = draw(st.integers(min_value=2, max_value=max_vertices))
    edges = []
    if connected:
        for v in range(1, n):
            edges.append((draw(st.integers(min_value=0, max_value=v - 1)), v))
    pairs = st.tuples(
        st.integers(min_value=0, max_value=n - 1), st.integers(min_value=0, max_value=n - 1)
    ).filter(lambda p: p[0] != p[1])
    extra = draw(
        st.lists(pairs, min_size=0 if edges else 1, max_size=max(0, max_edges - len(edges)))
    )
    return edges + [tuple(sorted(p)) for p in extra]


@st.composite
def graphic_matroids(draw, max_vertices: int = 5, max_edges: int = 8):
    return graphic(draw(multigraphs(max_vertices=max_vertices, max_edges=max_edges)))


@st.composite
def small_matroids(draw):
    """
    Graphic, uniform, truncated, dual and summed matroids on at most 8 elements, all loopless.

    A drawn graph with bridges has coloops, so its dual would have loops; the graph itself is
    returned instead.
    """
    kind = draw(st.sampled_from(["graphic", "uniform", "truncation", "dual", "sum"]))
    if kind == "graphic":
        return draw(graphic_matroids(max_vertices=5, max_edges=8))
    if kind == "uniform":
        n = draw(st.integers(min_value=1, max_value=7))
        return uniform(n, draw(st.integers(min_value=1, max_value=n)))
    if kind == "truncation":
        M = draw(graphic_matroids(max_vertices=5, max_edges=7))
        return truncation(M, draw(st.integers(min_value=1, max_value=M.full_rank)))
    if kind == "dual":
        M = draw(graphic_matroids(max_vertices=5, max_edges=8))
        return dual(M) if M.coloops() == 0 else M
    first = uniform(3, draw(st.integers(min_value=1, max_value=3)), ["a1", "a2", "a3"])
    second = draw(graphic_matroids(max_vertices=4, max_edges=5))
    return direct_sum([first, second])


@st.composite
def weights_for(draw, M, max_numerator: int = 6, max_denominator: int = 3):
    """Random positive rational weights keyed by the elements of M."""
    return {
        e: Fraction(
            draw(st.integers(min_value=1, max_value=max_numerator)),
            draw(st.integers(min_value=1, max_value=max_denominator)),
        )
        for e in M.ground
    }
