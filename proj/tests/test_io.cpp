#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <limits>

#include "socmov/io.hpp"

using namespace socmov;

namespace {

std::size_t error_line(std::string_view text) {
    try {
        parse_trajectory_csv(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

TrajectorySet simulated(int n, int steps, std::uint64_t seed) {
    Rng rng(seed);
    const ModelParams p{{Eigen::Vector3d(0.5, -1, 0.5), Eigen::Vector3d(-1, 1, 0.5), Eigen::Vector3d(0, 1, -0.5)}, 1.0, 0.8};
    return simulate_trajectories(n, steps, p, equal_phase_design(steps), initial_positions(n, 1.0, rng), rng);
}

}  // namespace

TEST_CASE("doubles round-trip at full precision") {
    Rng rng(1);
    std::uniform_real_distribution<double> unif(-1e6, 1e6);
    std::vector<double> values{0.1, -0.0, 1e-300, 5e-324, 1.7976931348623157e308, 1.0 / 3.0};
    for (int k = 0; k < 1000; ++k) values.push_back(unif(rng) * std::pow(10.0, k % 20 - 10));
    for (double v : values) {
        const std::string s = format_double(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(std::memcmp(&back, &v, sizeof v) == 0);
    }
}

TEST_CASE("trajectory tables round-trip") {
    const auto traj = simulated(5, 60, 2);
    Rng rng(3);
    const auto data = apply_multilabeling(traj, simulate_censoring(5, 60, 5, 5, 0.5, rng));
    const auto text = trajectory_csv(data);
    const auto back = parse_trajectory_csv(text);
    CHECK(back.label_names == data.label_names);
    REQUIRE(back.steps() == data.steps());
    for (int t = 0; t < data.steps(); ++t) {
        CHECK(back.frames[t].labels == data.frames[t].labels);
        CHECK(back.frames[t].positions == data.frames[t].positions);
    }
    CHECK(back.truth.empty());
    CHECK(trajectory_csv(back) == text);
}

TEST_CASE("complete data has J x T rows") {
    const auto text = trajectory_csv(as_dataset(simulated(5, 300, 4)));
    CHECK(std::count(text.begin(), text.end(), '\n') == 1501);
    const auto minimal = trajectory_csv(as_dataset(simulated(1, 2, 5)));
    CHECK(std::count(minimal.begin(), minimal.end(), '\n') == 3);
}

TEST_CASE("labels are opaque text") {
    const auto data = parse_trajectory_csv("t,label,x,y\r\n1,dolphin-B,0,0\r\n1,7,1,1\r\n2,7,1.5,1\r\n2,dolphin-B,0,0.5\r\n");
    CHECK(data.label_names == std::vector<std::string>{"dolphin-B", "7"});
    CHECK(data.frames[1].labels == std::vector<int>{0, 1});
    CHECK(data.frames[1].positions(1, 0) == 1.5);
    CHECK(data.uncensored());
    CHECK(frames_of(data)[1](0, 1) == 0.5);
}

TEST_CASE("parse errors carry line numbers") {
    CHECK(error_line("") == 1);
    CHECK(error_line("time,label,x,y\n1,a,0,0\n") == 1);
    CHECK(error_line("t,label,x,y\n1,a,0,0\n2,a,0\n") == 3);
    CHECK(error_line("t,label,x,y\n1,a,0,0\n2,a,zero,0\n") == 3);
    CHECK(error_line("t,label,x,y\n1,a,0,0\n2,a,nan,0\n") == 3);
    CHECK(error_line("t,label,x,y\n0,a,0,0\n") == 2);
    CHECK(error_line("t,label,x,y\n1.5,a,0,0\n") == 2);
    CHECK(error_line("t,label,x,y\n1,,0,0\n") == 2);
    CHECK(error_line("t,label,x,y\n1,a,0,0\n\n1,a,1,1\n") == 4);
    CHECK(error_line("t,label,x,y\n1,a,0,0\n2,b,0,0\n3,a,0,0\n") == 4);
    CHECK(error_line("t,label,x,y\n1,a,0,0\n2,a,0,0\n") == 0);
}

TEST_CASE("network and label-map tables") {
    DynamicNetwork net;
    net.frames.assign(2, AdjacencyMatrix(3));
    net.frames[1].set(0, 2, true);
    CHECK(network_csv(net, {"a", "b", "c"}) == "t,label_i,label_j\n2,a,c\n");

    const auto traj = simulated(2, 3, 6);
    const auto data = apply_multilabeling(traj, pattern_from_mask({{1, 0, 1}, {1, 1, 1}}));
    CHECK(label_map_csv(data) == "label,individual\nL1,1\nL2,2\nL3,1\n");
}

TEST_CASE("chain tables round-trip") {
    PosteriorSamples s;
    s.names = parameter_names(3);
    s.draws = Eigen::MatrixXd::Random(7, 11);
    s.iterations = {2, 4, 6, 8, 10, 12, 14};
    const auto table = parse_chain_csv(chain_csv(s));
    CHECK(table.names == s.names);
    CHECK(table.iterations == s.iterations);
    CHECK(table.draws == s.draws);
    CHECK_THROWS_AS(parse_chain_csv("iter,a\n1,2\n"), ParseError);
    CHECK_THROWS_AS(parse_chain_csv("iteration,a\n1,2,3\n"), ParseError);
}

TEST_CASE("atomic writes") {
    const auto dir = std::filesystem::temp_directory_path() / "socmov_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file_atomic(path, "first");
    write_file_atomic(path, "second");
    CHECK(read_file(path) == "second");
    CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    CHECK_THROWS(write_file_atomic(dir / "missing" / "x.txt", "x"));
    CHECK_THROWS(read_file(dir / "missing.txt"));
    std::filesystem::remove_all(dir);
}
