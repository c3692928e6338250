import itertools

import numpy as np
import pytest

from molinverse.chem import Molecule, parse_smiles, write_smiles
from molinverse.features import (
    Descriptor,
    ELEMENT,
    FRAGMENT,
    FeatureSchema,
    FragmentPattern,
    connected_bond_subsets,
    count_fragment,
    encode,
    extract_vocabulary,
    fragment_keys,
    merge_schemas,
)

from oracles import brute_force_isomorphic, random_molecule


def mol(s):
    return parse_smiles(s)


def fragment(smiles: str) -> FragmentPattern:
    return FragmentPattern.from_graph(mol(smiles))


def oracle_count(m: Molecule, f: FragmentPattern) -> int:
    """Brute force: every bond subset, connectivity by hand, iso by perms."""
    count = 0
    nb = len(m.bonds)
    for r in range(1, nb + 1):
        if r != f.edge_count:
            continue
        for subset in itertools.combinations(range(nb), r):
            atoms = sorted({a for k in subset for a in m.bonds[k][:2]})
            # connectivity of the bond subgraph
            adj = {a: set() for a in atoms}
            for k in subset:
                i, j, _ = m.bonds[k]
                adj[i].add(j)
                adj[j].add(i)
            seen = {atoms[0]}
            stack = [atoms[0]]
            while stack:
                v = stack.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) != len(atoms):
                continue
            relabel = {a: i for i, a in enumerate(atoms)}
            sub = Molecule(
                tuple(m.elements[a] for a in atoms),
                tuple(
                    sorted(
                        (relabel[m.bonds[k][0]], relabel[m.bonds[k][1]], m.bonds[k][2])
                        for k in subset
                    )
                ),
                tuple(0 for _ in atoms),
            )
            if brute_force_isomorphic(sub, f.graph):
                count += 1
    return count


class TestCountFragment:
    def test_propane_path(self):
        assert count_fragment(mol("CCC"), fragment("CCC")) == 1

    def test_benzene_single_and_double(self):
        benzene = mol("C1=CC=CC=C1")
        assert count_fragment(benzene, fragment("C=C")) == 3
        assert count_fragment(benzene, fragment("CC")) == 3

    def test_cyclohexane_paths(self):
        assert count_fragment(mol("C1CCCCC1"), fragment("CCC")) == 6

    def test_matches_brute_force(self):
        rng = np.random.default_rng(5)
        frags = [fragment(s) for s in ["CC", "C=C", "CO", "CCC", "CCO",
                                       "C=O", "CC(C)C", "CCCC", "C1CC1"]]
        for _ in range(25):
            m = random_molecule(rng, max_atoms=6)
            for f in frags:
                assert count_fragment(m, f) == oracle_count(m, f)

    def test_monotone_under_bond_addition(self):
        # C4 chain vs C4 ring: adding the closing bond never lowers counts
        chain = mol("CCCC")
        ring = mol("C1CCC1")
        for f in [fragment("CC"), fragment("CCC")]:
            assert count_fragment(ring, f) >= count_fragment(chain, f)


class TestVocabulary:
    def test_ethanol_level1(self):
        schema = extract_vocabulary([mol("CCO")], {1})
        kinds = [(d.kind, d.key) for d in schema.descriptors]
        frag_keys = [k for kind, k in kinds if kind == FRAGMENT]
        assert len(frag_keys) == 2  # C-C and C-O
        assert kinds[0][0] == ELEMENT
        assert len(schema) == 6  # C, O, rings, aromatic rings, C-C, C-O

    def test_benzene_level1(self):
        schema = extract_vocabulary([mol("C1=CC=CC=C1")], {1})
        frags = [d for d in schema.descriptors if d.kind == FRAGMENT]
        assert len(frags) == 2  # C-C and C=C

    def test_vocabulary_closure(self):
        rng = np.random.default_rng(9)
        dataset = [random_molecule(rng, max_atoms=7) for _ in range(20)]
        schema = extract_vocabulary(dataset, {1, 2, 3, 4})
        keys = {d.key for d in schema.descriptors if d.kind == FRAGMENT}
        for m in dataset:
            assert set(fragment_keys(m, {1, 2, 3, 4})) <= keys

    def test_empty_dataset_rejected(self):
        with pytest.raises(ValueError):
            extract_vocabulary([], {1})


class TestEncode:
    def test_ethanol_vector(self):
        schema = extract_vocabulary([mol("CCO")], {1})
        v = encode(mol("CCO"), schema)
        assert v.values == (2, 1, 0, 0, 1, 1)

    def test_methane_with_foreign_schema(self):
        schema = extract_vocabulary([mol("CCO")], {1})
        v = encode(mol("C"), schema)
        assert v.values == (1, 0, 0, 0, 0, 0)

    def test_isomorphism_invariance(self):
        rng = np.random.default_rng(13)
        dataset = [random_molecule(rng, max_atoms=6) for _ in range(10)]
        schema = extract_vocabulary(dataset, {1, 2, 3})
        for m in dataset:
            again = parse_smiles(write_smiles(m))
            assert encode(m, schema).values == encode(again, schema).values


class TestMerge:
    def _schemas(self):
        a = extract_vocabulary([mol("CCO"), mol("C=O")], {1, 2})
        b = extract_vocabulary([mol("CCN"), mol("C#N")], {1, 2})
        return a, b

    def test_idempotent(self):
        a, _ = self._schemas()
        assert merge_schemas(a, a) == a

    def test_commutative(self):
        a, b = self._schemas()
        assert merge_schemas(a, b) == merge_schemas(b, a)

    def test_dimension_bounds(self):
        a, b = self._schemas()
        merged = merge_schemas(a, b)
        assert max(len(a), len(b)) <= len(merged) <= len(a) + len(b)


class TestManifest:
    def test_roundtrip(self):
        schema = extract_vocabulary([mol("CCO"), mol("C1CC1")], {1, 2, 3})
        again = FeatureSchema.from_manifest(schema.to_manifest())
        assert again == schema

    def test_fragment_keys_parse_back(self):
        schema = extract_vocabulary([mol("OC1CCOC1")], {1, 2, 3, 4})
        for d in schema.descriptors:
            if d.kind == FRAGMENT:
                p = FragmentPattern.from_key(d.key)
                assert p.key == d.key
                assert p.edge_count == d.edge_count


class TestBondSubsets:
    def test_counts_against_combinations(self):
        rng = np.random.default_rng(17)
        for _ in range(15):
            m = random_molecule(rng, max_atoms=6)
            got = {s for s in connected_bond_subsets(m, 4)}
            # oracle: filter all combinations by connectivity
            expected = set()
            nb = len(m.bonds)
            for r in range(1, 5):
                for subset in itertools.combinations(range(nb), r):
                    atoms = {a for k in subset for a in m.bonds[k][:2]}
                    adj = {a: set() for a in atoms}
                    for k in subset:
                        i, j, _ = m.bonds[k]
                        adj[i].add(j)
                        adj[j].add(i)
                    start = next(iter(atoms))
                    seen = {start}
                    stack = [start]
                    while stack:
                        v = stack.pop()
                        for w in adj[v]:
                            if w not in seen:
                                seen.add(w)
                                stack.append(w)
                    if len(seen) == len(atoms):
                        expected.add(subset)
            assert got == expected
