#include <set>

#include "doctest.h"
#include "palmlab/torus.hpp"
#include "palmlab/util.hpp"

using namespace palmlab;

TEST_CASE("deferred acceptance on four sites with a tie") {
    AllocationMap a = stable_marriage_allocate(4, 1, {0, 2});
    CHECK(a.quota == 2);
    // sites 1 and 3 sit between the points; both prefer the smaller point,
    // which keeps the farther of its suitors by the larger-site rule
    CHECK(a.site_to_point == std::vector<int>{0, 2, 2, 0});
    CHECK(quota_exact(a));
    CHECK(find_blocking_pair(a).stable);

    AllocationMap b = stable_marriage_allocate(4, 1, {0, 3});
    CHECK(b.site_to_point == std::vector<int>{0, 0, 3, 3});
    CHECK(quota_exact(b));
    CHECK(find_blocking_pair(b).stable);
}

TEST_CASE("deferred acceptance on the 2x2 torus") {
    AllocationMap a = stable_marriage_allocate(2, 2, {0, 3});
    CHECK(a.quota == 2);
    CHECK(a.site_to_point == std::vector<int>{0, 3, 0, 3});
    CHECK(quota_exact(a));
    CHECK(find_blocking_pair(a).stable);

    std::string csv = allocation_csv(a);
    CHECK(csv ==
          "site_0,site_1,point_0,point_1\n"
          "0,0,0,0\n"
          "0,1,1,1\n"
          "1,0,0,0\n"
          "1,1,1,1\n");
}

TEST_CASE("allocation inputs are validated") {
    CHECK_THROWS_AS(stable_marriage_allocate(1, 1, {0}), InvalidInput);
    CHECK_THROWS_AS(stable_marriage_allocate(4, 1, {}), InvalidInput);
    CHECK_THROWS_AS(stable_marriage_allocate(4, 1, {0, 0}), InvalidInput);
    CHECK_THROWS_AS(stable_marriage_allocate(4, 1, {0, 4}), InvalidInput);
    CHECK_THROWS_AS(stable_marriage_allocate(4, 1, {0, 1, 2}), InvalidInput);  // 4 % 3 != 0
}

TEST_CASE("point sampling is seeded, sorted, and in range") {
    std::vector<int> p = sample_point_sites(16, 1, 4, 0);
    CHECK(p == std::vector<int>{3, 5, 6, 12});
    CHECK(sample_point_sites(16, 1, 4, 0) == p);
    CHECK(sample_point_sites(16, 1, 4, 1) == std::vector<int>{2, 3, 7, 15});

    std::vector<int> q = sample_point_sites(8, 2, 16, 9);
    CHECK(q.size() == 16);
    std::set<int> seen(q.begin(), q.end());
    CHECK(seen.size() == 16);
    CHECK(*seen.begin() >= 0);
    CHECK(*seen.rbegin() < 64);
    CHECK(std::is_sorted(q.begin(), q.end()));

    CHECK_THROWS_AS(sample_point_sites(4, 1, 0, 0), InvalidInput);
    CHECK_THROWS_AS(sample_point_sites(4, 1, 5, 0), InvalidInput);
}

TEST_CASE("shift coupling contracts with replicates and is bit-reproducible") {
    TorusConfig cfg;
    cfg.n = 8;
    cfg.d = 1;
    cfg.k = 2;
    cfg.replicates = 10000;
    cfg.radius_max = 2;
    cfg.seed = 7;
    CouplingReport r = verify_shift_coupling(cfg);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[0].replicates == 1000);
    CHECK(r.rows[1].replicates == 10000);
    CHECK(r.quota_violations == 0);
    CHECK(r.stability_spot_ok);
    CHECK(r.rows[1].tv < 0.03);
    CHECK(r.rows[1].tv <= r.rows[0].tv + 0.01);
    REQUIRE(r.control_rows.size() == 2);
    CHECK(r.control_rows[1].tv > 0.2);

    CouplingReport again = verify_shift_coupling(cfg);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(again.rows[i].tv == r.rows[i].tv);
        CHECK(again.control_rows[i].tv == r.control_rows[i].tv);
    }
}

TEST_CASE("window resampling matches only under the origin conditioning") {
    TorusConfig cfg;
    cfg.n = 8;
    cfg.d = 1;
    cfg.replicates = 10000;
    cfg.radius_max = 2;
    cfg.seed = 3;
    ResampleReport cond = verify_window_resample(cfg, 2, true);
    REQUIRE(cond.rows.size() == 2);
    CHECK(cond.rows[1].tv < 0.03);

    ResampleReport ctrl = verify_window_resample(cfg, 2, false);
    CHECK(ctrl.rows[1].tv > 0.08);
    CHECK(ctrl.rows[1].tv > cond.rows[1].tv);

    ResampleReport same = verify_window_resample(cfg, 2, true);
    CHECK(same.rows[1].tv == cond.rows[1].tv);

    // single-site window: recentering never moves, both laws are identical
    ResampleReport unit = verify_window_resample(cfg, 1, true);
    CHECK(unit.rows[1].tv == 0.0);
}

TEST_CASE("monte carlo inputs are validated") {
    TorusConfig cfg;
    cfg.n = 4;
    cfg.d = 1;
    cfg.k = 3;
    CHECK_THROWS_AS(verify_shift_coupling(cfg), InvalidInput);
    cfg.k = 2;
    cfg.replicates = 0;
    CHECK_THROWS_AS(verify_shift_coupling(cfg), InvalidInput);
    cfg.replicates = 10;
    cfg.radius_max = 9;
    CHECK_THROWS_AS(verify_shift_coupling(cfg), InvalidInput);
    cfg.radius_max = 2;
    CHECK_THROWS_AS(verify_window_resample(cfg, 5, true), InvalidInput);
    cfg.q_num = 3;
    cfg.q_den = 2;
    CHECK_THROWS_AS(verify_window_resample(cfg, 2, true), InvalidInput);
}
