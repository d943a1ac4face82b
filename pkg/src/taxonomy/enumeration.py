"""Isomorphism classes of colorings obtained by dropping equations.

Each coloring is encoded as the integer of its dropped equations: pair k (in
lexicographic order) owns bit 2k for view pair (1,2) and bit 2k+1 for view
pair (1,3); with two views pair k owns bit k. All C(n_avail, n_drop) masks are
generated at once, the generators of S_N (a transposition and an N-cycle) and
the view swap act on them as bit permutations, and orbits are found by
min-label propagation over the resulting permutation graph. The canonical
representative of a class is its smallest mask.
"""

import logging
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from scipy.special import comb

from src.errors import Infeasible
from src.taxonomy.coloring import Color, Coloring, point_pairs

logger = logging.getLogger(__name__)


def bit_count(n_points: int, num_views: int) -> int:
    pairs = n_points * (n_points - 1) // 2
    return pairs if num_views == 2 else 2 * pairs


def _pair_index(n_points: int) -> dict[tuple[int, int], int]:
    return {pair: k for k, pair in enumerate(point_pairs(n_points))}


def permutation_bitmap(sigma, n_points: int, num_views: int) -> np.ndarray:
    """dest[b]: the bit that bit b moves to under the point relabeling σ."""
    index = _pair_index(n_points)
    width = 1 if num_views == 2 else 2
    dest = np.empty(bit_count(n_points, num_views), dtype=np.int64)
    for (p, q), k in index.items():
        a, b = sigma[p], sigma[q]
        target = index[(min(a, b), max(a, b))]
        for v in range(width):
            dest[width * k + v] = width * target + v
    return dest


def view_swap_bitmap(n_points: int) -> np.ndarray:
    dest = np.arange(bit_count(n_points, 3), dtype=np.int64)
    return dest ^ 1


def apply_bitmap(masks: np.ndarray, dest: np.ndarray) -> np.ndarray:
    image = np.zeros_like(masks)
    for b, target in enumerate(dest):
        image |= ((masks >> b) & 1) << int(target)
    return image


def all_masks(n_bits: int, n_drop: int) -> np.ndarray:
    """Sorted integers with exactly ``n_drop`` of ``n_bits`` bits set."""
    if n_drop == 0:
        return np.zeros(1, dtype=np.int64)
    total = int(comb(n_bits, n_drop, exact=True))
    combos = np.fromiter(
        combinations(range(n_bits), n_drop), dtype=np.dtype((np.int8, n_drop)), count=total
    )
    masks = np.zeros(total, dtype=np.int64)
    for j in range(n_drop):
        masks |= np.left_shift(np.int64(1), combos[:, j].astype(np.int64))
    masks.sort()
    return masks


def mask_to_coloring(mask: int, n_points: int, num_views: int) -> Coloring:
    colors = []
    for k in range(n_points * (n_points - 1) // 2):
        if num_views == 2:
            colors.append(Color.W if mask >> k & 1 else Color.B)
            continue
        drop12, drop13 = mask >> (2 * k) & 1, mask >> (2 * k + 1) & 1
        if drop12 and drop13:
            colors.append(Color.W)
        elif drop13:
            colors.append(Color.R)
        elif drop12:
            colors.append(Color.G)
        else:
            colors.append(Color.B)
    return Coloring(n_points, tuple(colors))


def coloring_to_mask(c: Coloring, num_views: int) -> int:
    mask = 0
    for k, color in enumerate(c.colors):
        if num_views == 2:
            mask |= int(color is Color.W) << k
            continue
        if color in (Color.G, Color.W):
            mask |= 1 << (2 * k)
        if color in (Color.R, Color.W):
            mask |= 1 << (2 * k + 1)
    return mask


def canonical_mask(c: Coloring, num_views: int) -> int:
    """Smallest mask over all relabelings σ and view swaps τ."""
    n_points = c.n_points
    mask = np.array([coloring_to_mask(c, num_views)], dtype=np.int64)
    best = int(mask[0])
    swap = view_swap_bitmap(n_points) if num_views == 3 else None
    for sigma in permutations(range(n_points)):
        image = apply_bitmap(mask, permutation_bitmap(sigma, n_points, num_views))
        best = min(best, int(image[0]))
        if swap is not None:
            best = min(best, int(apply_bitmap(image, swap)[0]))
    return best


def canonical_form(c: Coloring, num_views: int) -> Coloring:
    return mask_to_coloring(canonical_mask(c, num_views), c.n_points, num_views)


@dataclass(frozen=True)
class ClassCatalog:
    n_points: int
    num_views: int
    n_drop: int
    masks: tuple[int, ...]
    sizes: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.masks)

    def colorings(self) -> list[Coloring]:
        return [mask_to_coloring(m, self.n_points, self.num_views) for m in self.masks]

    def coloring(self, class_id: int) -> Coloring:
        return mask_to_coloring(self.masks[class_id], self.n_points, self.num_views)

    def class_of(self, c: Coloring) -> int:
        return self.masks.index(canonical_mask(c, self.num_views))

    def records(self):
        for class_id, c in enumerate(self.colorings()):
            yield {
                "n": self.n_points,
                "m": self.num_views,
                "drop": self.n_drop,
                "class_id": class_id,
                "size": self.sizes[class_id],
                "coloring": c.to_json(),
            }


def _orbit_labels(masks: np.ndarray, generators: list[np.ndarray]) -> np.ndarray:
    images = [np.searchsorted(masks, apply_bitmap(masks, dest)) for dest in generators]
    labels = np.arange(masks.size, dtype=np.int64)
    rounds = 0
    while True:
        rounds += 1
        new = labels.copy()
        for image in images:
            np.minimum(new, labels[image], out=new)
            new[image] = np.minimum(new[image], labels)
        new = new[new]
        new = new[new]
        if np.array_equal(new, labels):
            break
        labels = new
    logger.debug(f"Orbit labels converged after {rounds} rounds")
    return labels


def enumerate_catalog(n_points: int, num_views: int, n_drop: int) -> ClassCatalog:
    if n_drop < 0:
        raise Infeasible(f"cannot drop {n_drop} equations")
    n_bits = bit_count(n_points, num_views)
    if n_drop > n_bits:
        raise Infeasible(f"only {n_bits} equations are available")

    masks = all_masks(n_bits, n_drop)
    logger.info(f"Enumerating {masks.size} colorings (N={n_points}, M={num_views}, drop={n_drop})")

    generators = []
    if n_points > 1:
        transposition = list(range(n_points))
        transposition[0], transposition[1] = 1, 0
        cycle = [(p + 1) % n_points for p in range(n_points)]
        generators.append(permutation_bitmap(transposition, n_points, num_views))
        generators.append(permutation_bitmap(cycle, n_points, num_views))
    if num_views == 3:
        generators.append(view_swap_bitmap(n_points))

    labels = _orbit_labels(masks, generators)
    roots, sizes = np.unique(labels, return_counts=True)
    logger.info(f"Found {roots.size} isomorphism classes")
    return ClassCatalog(
        n_points=n_points,
        num_views=num_views,
        n_drop=n_drop,
        masks=tuple(int(m) for m in masks[roots]),
        sizes=tuple(int(s) for s in sizes),
    )


def enumerate_classes(n_points: int, num_views: int, n_drop: int) -> list[Coloring]:
    return enumerate_catalog(n_points, num_views, n_drop).colorings()
