import pytest

from trendcast.events import Event, build
from trendcast.ingestion import (
    DatasetSpec,
    RatingRecord,
    load_dataset,
    load_ratings,
    load_votes,
    subset_users,
    write_ratings_csv,
    write_votes_csv,
)


def ratings_file(tmp_path, rows, name="ratings.csv"):
    path = tmp_path / name
    path.write_text("user,item,rating,timestamp\n" + "".join(f"{r}\n" for r in rows))
    return path


def votes_file(tmp_path, rows, name="votes.csv"):
    path = tmp_path / name
    path.write_text("user,item,timestamp\n" + "".join(f"{r}\n" for r in rows))
    return path


class TestDatasetSpec:
    def test_threshold_range(self):
        with pytest.raises(ValueError):
            DatasetSpec(threshold=5.5)
        with pytest.raises(ValueError):
            DatasetSpec(threshold=0.0)

    def test_subsetting_rejected_for_votes(self):
        with pytest.raises(ValueError):
            DatasetSpec(format="votes", subset_users=10)

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            DatasetSpec(format="parquet")


class TestLoadRatings:
    def test_threshold_boundary_kept(self, tmp_path):
        path = ratings_file(tmp_path, ["1,10,3.0,100", "2,10,2.5,200"])
        events = load_ratings(path)
        assert events == [Event(1, 10, 100)]

    def test_drop_count(self, tmp_path):
        rows = [f"{u},1,{r},{10 * u}" for u, r in enumerate([1, 2, 2.5, 2, 3, 3.5, 4, 5, 4.5, 3])]
        events = load_ratings(ratings_file(tmp_path, rows))
        assert len(events) == 6

    def test_malformed_row_reports_line(self, tmp_path):
        path = ratings_file(tmp_path, ["1,10,3.0,100", "1,10,oops,100"])
        with pytest.raises(ValueError, match=":3"):
            load_ratings(path)

    def test_rating_off_scale(self, tmp_path):
        path = ratings_file(tmp_path, ["1,10,6.0,100"])
        with pytest.raises(ValueError, match="outside"):
            load_ratings(path)

    def test_header_checked(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            load_ratings(path)

    def test_empty_file_downstream_error(self, tmp_path):
        path = ratings_file(tmp_path, [])
        with pytest.raises(ValueError, match="empty event stream"):
            build(load_ratings(path))


class TestLoadVotes:
    def test_every_row_is_an_event(self, tmp_path):
        path = votes_file(tmp_path, ["1,10,100", "2,10,200", "3,11,300"])
        assert len(load_votes(path)) == 3

    def test_duplicate_votes_collapse_at_build(self, tmp_path):
        path = votes_file(tmp_path, ["1,10,100", "1,10,50"])
        g = build(load_votes(path))
        assert g.num_links == 1 and g.events[0].timestamp == 50

    def test_malformed_row(self, tmp_path):
        path = votes_file(tmp_path, ["1,10"])
        with pytest.raises(ValueError, match=":2"):
            load_votes(path)


class TestSubsetUsers:
    def events(self, num_users=30, per_user=25):
        return [
            Event(u, 1000 + k, u * 1000 + k)
            for u in range(num_users)
            for k in range(per_user)
        ]

    def test_all_eligible_users_when_count_matches(self):
        events = self.events(num_users=5)
        kept = subset_users(events, 5, min_degree=20, seed=1)
        assert sorted(set(e.user_id for e in kept)) == list(range(5))
        assert len(kept) == len(events)

    def test_zero_users_rejected(self):
        with pytest.raises(ValueError):
            subset_users(self.events(), 0)

    def test_too_few_eligible_reports_count(self):
        events = self.events(num_users=3)
        with pytest.raises(ValueError, match="only 3"):
            subset_users(events, 10)

    def test_min_degree_filters(self):
        events = self.events(num_users=4, per_user=25) + [Event(99, 1, 1)]
        kept = subset_users(events, 4, min_degree=20, seed=0)
        assert 99 not in {e.user_id for e in kept}

    def test_deterministic_for_seed(self):
        events = self.events()
        a = subset_users(events, 10, seed=42)
        b = subset_users(events, 10, seed=42)
        assert a == b
        c = subset_users(events, 10, seed=43)
        assert {e.user_id for e in a} != {e.user_id for e in c}

    def test_selection_independent_of_event_order(self, rng):
        events = self.events()
        shuffled = list(events)
        rng.shuffle(shuffled)
        a = {e.user_id for e in subset_users(events, 10, seed=7)}
        b = {e.user_id for e in subset_users(shuffled, 10, seed=7)}
        assert a == b


class TestLoadWithSubsetting:
    def write(self, tmp_path, eligible=6, ineligible=3):
        rows = []
        for u in range(eligible):
            rows += [f"{u},{100 + k},4.0,{u * 50 + k}" for k in range(20)]
        for u in range(100, 100 + ineligible):
            # 20 ratings but only 5 clear the threshold
            rows += [f"{u},{100 + k},{4.0 if k < 5 else 2.0},{u * 50 + k}" for k in range(20)]
        return ratings_file(tmp_path, rows)

    def test_post_threshold_eligibility(self, tmp_path):
        path = self.write(tmp_path)
        spec = DatasetSpec(subset_users=6, min_user_degree=20, rng_seed=3)
        events = load_ratings(path, spec)
        assert {e.user_id for e in events} == set(range(6))

    def test_pre_threshold_eligibility_widens_pool(self, tmp_path):
        path = self.write(tmp_path)
        spec = DatasetSpec(
            subset_users=9, min_user_degree=20, rng_seed=3, eligibility_pre_threshold=True
        )
        events = load_ratings(path, spec)
        users = {e.user_id for e in events}
        assert len(users) == 9
        # the below-threshold rows themselves still never become events
        assert all(e.item_id >= 100 for e in events)
        per_user = {u: sum(1 for e in events if e.user_id == u) for u in users}
        assert {per_user[u] for u in users if u >= 100} == {5}

    def test_load_dataset_dispatch(self, tmp_path):
        votes = votes_file(tmp_path, ["1,2,3"])
        assert load_dataset(votes, DatasetSpec(format="votes")) == [Event(1, 2, 3)]


class TestWriters:
    def test_votes_round_trip(self, tmp_path):
        events = [Event(1, 2, 3), Event(4, 5, 6)]
        path = tmp_path / "out.csv"
        write_votes_csv(events, path)
        assert load_votes(path) == events

    def test_ratings_round_trip(self, tmp_path):
        path = tmp_path / "out.csv"
        write_ratings_csv([RatingRecord(1, 2, 4.5, 3)], path)
        assert load_ratings(path) == [Event(1, 2, 3)]
