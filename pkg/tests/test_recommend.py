import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from scenerec.errors import ParseError
from scenerec.recommend import (
    brute_force_candidates,
    read_candidates_csv,
    score_scenes,
    select_candidates,
    summarize_candidates,
    write_candidates_csv,
)

from conftest import make_matrix


class TestScoreScenes:
    def test_hand_checked_example(self):
        # rows: s0 = [8, 2], s1 = [1, 9]; column sums 9 and 11
        matrix = make_matrix([[8, 2], [1, 9]])
        entries = score_scenes(matrix, 0.3)
        assert [(e.scene_name, e.object_name) for e in entries] == [("s0", "o0"), ("s1", "o1")]
        assert entries[0].exclusivity == 0.8
        assert entries[0].score == 8 / 9
        assert entries[1].exclusivity == 0.9
        assert entries[1].score == 9 / 11

    def test_threshold_is_strict(self):
        # both cells sit exactly at exclusivity 0.5
        matrix = make_matrix([[5, 5]])
        assert score_scenes(matrix, 0.5) == []
        assert len(score_scenes(matrix, 0.49)) == 2

    def test_zero_cells_carry_no_evidence(self):
        matrix = make_matrix([[0, 0], [0, 3]])
        entries = score_scenes(matrix, 0.0)
        assert [(e.scene_id, e.object_id) for e in entries] == [(1, 1)]
        assert entries[0].score == 1.0
        assert entries[0].exclusivity == 1.0

    def test_all_zero_matrix(self):
        matrix = make_matrix(np.zeros((3, 2), dtype=np.int64))
        assert score_scenes(matrix, 0.1) == []

    def test_threshold_range_validated(self):
        matrix = make_matrix([[1]])
        with pytest.raises(ValueError, match="threshold must be in"):
            score_scenes(matrix, 1.0)
        with pytest.raises(ValueError, match="threshold must be in"):
            score_scenes(matrix, -0.1)

    def test_score_sums_to_one_per_column(self):
        # with T=0 every nonzero cell is admitted, so each column's scores
        # partition that object's scene mass
        matrix = make_matrix([[3, 1], [2, 5], [5, 0]])
        entries = score_scenes(matrix, 0.0)
        for j in range(2):
            total = sum(e.score for e in entries if e.object_id == j)
            assert total == pytest.approx(1.0)


class TestSelectCandidates:
    def test_ranking_and_truncation(self):
        matrix = make_matrix([[8, 2], [1, 9]])
        entries = score_scenes(matrix, 0.3)
        candidates = select_candidates(entries, 1, 0.3)
        assert len(candidates.entries) == 1
        assert candidates.entries[0].scene_name == "s0"  # 8/9 > 9/11
        assert candidates.n == 1
        assert candidates.threshold == 0.3

    def test_tie_breaks_on_scene_then_object(self):
        # (s0, o0) and (s2, o0) both score 0.5; s0 must come first
        matrix = make_matrix([[3, 0], [0, 3], [3, 0]])
        candidates = select_candidates(score_scenes(matrix, 0.0), 3, 0.0)
        ranked = [(e.scene_id, e.object_id) for e in candidates.entries]
        assert ranked == [(1, 1), (0, 0), (2, 0)]

    def test_n_validated(self):
        with pytest.raises(ValueError, match="n must be >= 1"):
            select_candidates([], 0, 0.3)

    def test_by_object_groups_keep_rank_order(self):
        matrix = make_matrix([[9, 0], [5, 5], [0, 8]])
        candidates = select_candidates(score_scenes(matrix, 0.2), 10, 0.2)
        groups = candidates.by_object()
        assert list(groups) == ["o0", "o1"]
        scores = [e.score for e in groups["o0"]]
        assert scores == sorted(scores, reverse=True)
        assert candidates.scenes_for("o0") == [e.scene_name for e in groups["o0"]]


class TestBruteForce:
    def test_matches_main_path_on_hand_example(self):
        matrix = make_matrix([[8, 2], [1, 9]])
        main = select_candidates(score_scenes(matrix, 0.3), 2, 0.3)
        oracle = brute_force_candidates(matrix, 0.3, 2)
        assert main.entries == oracle.entries

    def test_size_bound_enforced(self):
        matrix = make_matrix(np.zeros((33, 2), dtype=np.int64))
        with pytest.raises(ValueError, match="exceeds the brute-force bound"):
            brute_force_candidates(matrix, 0.3, 5)

    def test_parameter_validation(self):
        matrix = make_matrix([[1]])
        with pytest.raises(ValueError, match="threshold"):
            brute_force_candidates(matrix, 1.5, 1)
        with pytest.raises(ValueError, match="n must be"):
            brute_force_candidates(matrix, 0.3, 0)


@settings(max_examples=200, deadline=None)
@given(
    hnp.arrays(
        np.int64,
        st.tuples(st.integers(1, 20), st.integers(1, 10)),
        elements=st.integers(0, 100),
    ),
    st.sampled_from([0.1, 0.3, 0.5]),
    st.integers(1, 40),
)
def test_oracle_equivalence_property(counts, threshold, n):
    matrix = make_matrix(counts)
    main = select_candidates(score_scenes(matrix, threshold), n, threshold)
    oracle = brute_force_candidates(matrix, threshold, n)
    assert main.entries == oracle.entries


class TestCsv:
    def test_round_trip_preserves_scores_exactly(self, tmp_path):
        matrix = make_matrix([[7, 3], [2, 9], [1, 0]])
        candidates = select_candidates(score_scenes(matrix, 0.3), 4, 0.3)
        path = tmp_path / "cand.csv"
        write_candidates_csv(candidates, path)
        back = read_candidates_csv(path)
        assert back.n == candidates.n
        assert back.threshold == candidates.threshold
        assert [(e.scene_name, e.object_name, e.score, e.exclusivity) for e in back.entries] == [
            (e.scene_name, e.object_name, e.score, e.exclusivity) for e in candidates.entries
        ]

    def test_missing_annotation(self, tmp_path):
        path = tmp_path / "cand.csv"
        path.write_text("scene_name,object_name,score,exclusivity,rank\n")
        with pytest.raises(ParseError, match="missing '# T="):
            read_candidates_csv(path)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "cand.csv"
        path.write_text("# T=0.3 n=5\nsea,boat,0.5,0.9,1\n")
        with pytest.raises(ParseError, match="missing candidate header"):
            read_candidates_csv(path)


class TestSummary:
    def test_groups_by_object(self):
        matrix = make_matrix([[9, 0], [0, 8]])
        text = summarize_candidates(select_candidates(score_scenes(matrix, 0.3), 5, 0.3))
        assert "o0:" in text and "o1:" in text
        assert "s0" in text and "s1" in text

    def test_empty_set(self):
        empty = select_candidates([], 5, 0.3)
        assert "No candidate scenes" in summarize_candidates(empty)
