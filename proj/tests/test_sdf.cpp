#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "liqrec/sdf.hpp"

using namespace liqrec;

namespace {

// flat floor at z = 0, solid below
VoxelSDF floor_sdf(double resolution = 0.01) {
    ScenePrimitive floor;
    floor.shape = ScenePrimitive::Shape::HalfSpace;
    floor.point = {0, 0, 0};
    floor.normal = {0, 0, 1};
    GridSpec grid;
    grid.nx = grid.ny = grid.nz = 41;
    grid.origin = {-0.2, -0.2, -0.2};
    grid.resolution = resolution;
    return build_sdf_from_scene({floor}, grid);
}

} // namespace

TEST_CASE("trilinear sampling reproduces node values exactly") {
    VoxelSDF sdf;
    sdf.nx = sdf.ny = sdf.nz = 4;
    sdf.origin = {0.5, -1.0, 2.0};
    sdf.resolution = 0.25;
    sdf.values.resize(64);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (auto& v : sdf.values) v = dist(rng);
    for (int k = 0; k < 4; ++k)
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) {
                Vec3 p = sdf.origin + Vec3{i * 0.25, j * 0.25, k * 0.25};
                CHECK(sdf.sample(p) == doctest::Approx(sdf.at(i, j, k)).epsilon(1e-12));
            }
}

TEST_CASE("trilinear sampling is linear between nodes") {
    VoxelSDF sdf;
    sdf.nx = 2;
    sdf.ny = sdf.nz = 1;
    sdf.origin = {0, 0, 0};
    sdf.resolution = 0.1;
    sdf.values = {0.1f, 0.3f};
    CHECK(sdf.sample({0.05, 0, 0}) == doctest::Approx(0.2).epsilon(1e-7));
    CHECK(sdf.sample({0.025, 0, 0}) == doctest::Approx(0.15).epsilon(1e-7));
}

TEST_CASE("sampling clamps to the border outside the grid") {
    VoxelSDF sdf;
    sdf.nx = 2;
    sdf.ny = sdf.nz = 1;
    sdf.origin = {0, 0, 0};
    sdf.resolution = 0.1;
    sdf.values = {0.1f, 0.3f};
    CHECK(sdf.sample({-5.0, 0, 0}) == doctest::Approx(0.1).epsilon(1e-7));
    CHECK(sdf.sample({5.0, 3.0, -2.0}) == doctest::Approx(0.3).epsilon(1e-7));
}

TEST_CASE("half-space grid matches the analytic plane distance") {
    VoxelSDF sdf = floor_sdf();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(-0.15, 0.15);
    for (int n = 0; n < 200; ++n) {
        Vec3 p{dist(rng), dist(rng), dist(rng)};
        // the plane SDF is linear, so trilinear interpolation is near exact
        CHECK(sdf.sample(p) == doctest::Approx(p.z).epsilon(0).scale(1).epsilon(1e-5));
    }
}

TEST_CASE("collision constraint is penetration depth") {
    VoxelSDF sdf = floor_sdf();
    CHECK(collision_constraint(sdf, {0, 0, 0.05}) == 0.0);
    CHECK(collision_constraint(sdf, {0, 0, -0.03}) == doctest::Approx(0.03).epsilon(1e-4));
}

TEST_CASE("one collision pass pushes a penetrating particle back to the plane") {
    VoxelSDF sdf = floor_sdf();
    ParticleState s;
    s.append({0.01, -0.02, -0.025}, {0, 0, 0}, {0.01, -0.02, -0.025});
    CollisionResult res = solve_collision(sdf, s);
    REQUIRE(res.displacements.size() == 1);
    CHECK(res.degenerate_gradients == 0);
    Vec3 d = res.displacements[0];
    // displacement is along +z by the penetration depth
    CHECK(d.z == doctest::Approx(0.025).epsilon(1e-2));
    CHECK(std::abs(d.x) < 1e-3);
    CHECK(std::abs(d.y) < 1e-3);
    // free particles are untouched
    ParticleState free_s;
    free_s.append({0, 0, 0.1}, {0, 0, 0}, {0, 0, 0.1});
    CollisionResult free_res = solve_collision(sdf, free_s);
    CHECK(free_res.displacements[0].norm() == 0.0);
}

TEST_CASE("200 penetrating particles resolved to a tenth of the resolution") {
    VoxelSDF sdf = floor_sdf();
    ParticleState s;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> xy(-0.1, 0.1);
    std::uniform_real_distribution<double> depth(0.0, 0.03);
    for (int i = 0; i < 200; ++i) {
        Vec3 p{xy(rng), xy(rng), -depth(rng)};
        s.append(p, {0, 0, 0}, p);
    }
    for (int pass = 0; pass < 5; ++pass) {
        CollisionResult res = solve_collision(sdf, s);
        for (std::size_t i = 0; i < s.size(); ++i) s.positions[i] += res.displacements[i];
    }
    double worst = 0.0;
    for (const auto& p : s.positions) worst = std::max(worst, collision_constraint(sdf, p));
    CHECK(worst <= sdf.resolution / 10.0);
}

TEST_CASE("repeated passes never increase penetration depth") {
    VoxelSDF sdf = floor_sdf();
    ParticleState s;
    for (int i = 0; i < 20; ++i) {
        Vec3 p{0.005 * i - 0.05, 0.0, -0.001 * (i + 1)};
        s.append(p, {0, 0, 0}, p);
    }
    auto max_pen = [&] {
        double worst = 0.0;
        for (const auto& p : s.positions) worst = std::max(worst, collision_constraint(sdf, p));
        return worst;
    };
    double prev = max_pen();
    for (int pass = 0; pass < 6; ++pass) {
        CollisionResult res = solve_collision(sdf, s);
        for (std::size_t i = 0; i < s.size(); ++i) s.positions[i] += res.displacements[i];
        double cur = max_pen();
        CHECK(cur <= prev * 1.05 + 1e-12);
        prev = cur;
    }
}

TEST_CASE("box primitive sign convention") {
    ScenePrimitive box;
    box.shape = ScenePrimitive::Shape::Box;
    box.box_min = {-0.1, -0.1, -0.1};
    box.box_max = {0.1, 0.1, 0.1};
    CHECK(box.evaluate({0, 0, 0}) < 0.0);          // inside is negative
    CHECK(box.evaluate({0.2, 0, 0}) ==
          doctest::Approx(0.1).epsilon(1e-9));     // outside, face distance
    CHECK(box.evaluate({0, 0, 0.1}) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("cylinder primitive sign convention") {
    ScenePrimitive cyl;
    cyl.shape = ScenePrimitive::Shape::Cylinder;
    cyl.point = {0, 0, 0};
    cyl.cyl_radius = 0.05;
    cyl.cyl_zmin = 0.0;
    cyl.cyl_zmax = 0.2;
    CHECK(cyl.evaluate({0, 0, 0.1}) < 0.0);
    CHECK(cyl.evaluate({0.1, 0, 0.1}) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(cyl.evaluate({0, 0, 0.4}) == doctest::Approx(0.2).epsilon(1e-9));
}

TEST_CASE("negated box carves an open basin out of a floor") {
    // solid floor at z<=0.1 minus an open box: the classic container
    ScenePrimitive slab;
    slab.shape = ScenePrimitive::Shape::HalfSpace;
    slab.point = {0, 0, 0.1};
    slab.normal = {0, 0, 1};
    ScenePrimitive cavity;
    cavity.shape = ScenePrimitive::Shape::Box;
    cavity.box_min = {-0.08, -0.08, 0.0};
    cavity.box_max = {0.08, 0.08, 0.2};
    cavity.negate = true;
    cavity.combine = ScenePrimitive::Combine::Intersect;

    GridSpec grid;
    grid.nx = grid.ny = grid.nz = 41;
    grid.origin = {-0.2, -0.2, -0.2};
    grid.resolution = 0.01;
    VoxelSDF sdf = build_sdf_from_scene({slab, cavity}, grid);

    CHECK(sdf.sample({0, 0, 0.05}) > 0.0);   // inside the basin: free
    CHECK(sdf.sample({0, 0, 0.15}) > 0.0);   // above the rim: free
    CHECK(sdf.sample({0.15, 0, 0.05}) < 0.0); // in the wall: solid
    CHECK(sdf.sample({0, 0, -0.05}) < 0.0);  // below the basin floor: solid
}

TEST_CASE("union takes the minimum of member distances") {
    ScenePrimitive a, b;
    a.shape = b.shape = ScenePrimitive::Shape::HalfSpace;
    a.point = {0, 0, 0};
    a.normal = {0, 0, 1};
    b.point = {0.05, 0, 0};
    b.normal = {-1, 0, 0}; // solid where x >= 0.05
    b.combine = ScenePrimitive::Combine::Union;
    GridSpec grid;
    grid.nx = grid.ny = grid.nz = 21;
    grid.origin = {-0.1, -0.1, -0.1};
    grid.resolution = 0.01;
    VoxelSDF sdf = build_sdf_from_scene({a, b}, grid);
    // near the corner the closer surface wins
    CHECK(sdf.sample({0.03, 0, 0.08}) == doctest::Approx(0.02).epsilon(1e-5));
    CHECK(sdf.sample({-0.05, 0, 0.03}) == doctest::Approx(0.03).epsilon(1e-5));
}

TEST_CASE("empty scene is rejected") {
    GridSpec grid;
    grid.nx = grid.ny = grid.nz = 2;
    grid.resolution = 0.1;
    CHECK_THROWS(build_sdf_from_scene({}, grid));
}

TEST_CASE("raw gradient of a plane field points along the normal") {
    VoxelSDF sdf = floor_sdf();
    Vec3 g = sdf.raw_gradient({0.02, -0.03, -0.01}).normalized();
    CHECK(g.z == doctest::Approx(1.0).epsilon(1e-6));
}
