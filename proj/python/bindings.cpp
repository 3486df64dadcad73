#include <optional>
#include <string>

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "socmov/diagnostics.hpp"
#include "socmov/io.hpp"
#include "socmov/sampler.hpp"
#include "socmov/simulate.hpp"
#include "socmov/study.hpp"

namespace py = pybind11;
using namespace socmov;

namespace {

AdjacencyMatrix adjacency_from(const Eigen::MatrixXi& dense) { return AdjacencyMatrix::from_dense(dense); }

/// 1-based phase boundaries; both absent means three equal phases.
CovariateMatrix design_for(int steps, std::optional<int> during_start, std::optional<int> after_start) {
    if (!during_start && !after_start) return equal_phase_design(steps);
    if (!during_start || !after_start) throw std::invalid_argument("give both during_start and after_start");
    if (!(1 <= *during_start && *during_start < *after_start && *after_start <= steps))
        throw std::invalid_argument("phase boundaries must satisfy 1 <= during_start < after_start <= steps");
    return phase_design(steps, *during_start - 1, *after_start - 1);
}

py::array_t<double> positions_array(const TrajectorySet& traj) {
    const auto steps = static_cast<py::ssize_t>(traj.steps());
    const auto n = static_cast<py::ssize_t>(traj.individuals());
    py::array_t<double> out({steps, n, py::ssize_t{2}});
    auto v = out.mutable_unchecked<3>();
    for (py::ssize_t t = 0; t < steps; ++t)
        for (py::ssize_t i = 0; i < n; ++i)
            for (py::ssize_t a = 0; a < 2; ++a) v(t, i, a) = traj.positions[t](i, a);
    return out;
}

py::array_t<std::uint8_t> network_array(const TrajectorySet& traj) {
    const auto steps = static_cast<py::ssize_t>(traj.steps());
    const auto n = static_cast<py::ssize_t>(traj.individuals());
    py::array_t<std::uint8_t> out({steps, n, n});
    auto v = out.mutable_unchecked<3>();
    for (py::ssize_t t = 0; t < steps; ++t)
        for (py::ssize_t i = 0; i < n; ++i)
            for (py::ssize_t j = 0; j < n; ++j)
                v(t, i, j) = traj.network.frames[t](static_cast<int>(i), static_cast<int>(j));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Movement-model simulation and inference for censored, multiply-labeled trajectories";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<EstimationError>(m, "EstimationError", PyExc_ValueError);
    py::register_exception<InitializationError>(m, "InitializationError", PyExc_RuntimeError);

    py::class_<MlmdDataset>(m, "Dataset")
        .def_property_readonly("steps", &MlmdDataset::steps)
        .def_property_readonly("label_count", &MlmdDataset::label_count)
        .def_property_readonly("record_count", &MlmdDataset::record_count)
        .def_property_readonly("label_names", [](const MlmdDataset& d) { return d.label_names; })
        .def_property_readonly("truth", [](const MlmdDataset& d) { return d.truth; })
        .def("uncensored", &MlmdDataset::uncensored)
        .def("frame", [](const MlmdDataset& d, int t) {
            if (t < 0 || t >= d.steps()) throw py::index_error("step out of range");
            return py::make_tuple(d.frames[t].labels, Eigen::MatrixXd(d.frames[t].positions));
        }, py::arg("t"), "Labels and positions observed at 0-based step t.")
        .def("to_csv", [](const MlmdDataset& d) { return trajectory_csv(d); })
        .def("label_map_csv", [](const MlmdDataset& d) { return label_map_csv(d); })
        .def_static("from_csv", [](const std::string& text) { return parse_trajectory_csv(text); }, py::arg("text"));

    py::class_<TrajectorySet>(m, "Trajectories")
        .def_property_readonly("steps", &TrajectorySet::steps)
        .def_property_readonly("individuals", &TrajectorySet::individuals)
        .def_property_readonly("positions", &positions_array, "Array of shape (steps, individuals, 2).")
        .def_property_readonly("network", &network_array, "Adjacency with unit diagonal, shape (steps, J, J).")
        .def_property_readonly("covariates", [](const TrajectorySet& t) { return t.covariates; })
        .def("as_dataset", &as_dataset);

    m.def("simulate", [](int individuals, int steps, const Eigen::VectorXd& delta_alpha,
                         const Eigen::VectorXd& delta_beta, const Eigen::VectorXd& delta_p, double sigma2,
                         double phi, std::uint64_t seed, std::optional<int> during_start,
                         std::optional<int> after_start) {
        const ModelParams params{{delta_alpha, delta_beta, delta_p}, sigma2, phi};
        params.validate();
        const auto x = design_for(steps, during_start, after_start);
        Rng rng(seed);
        const auto init = initial_positions(individuals, sigma2, rng);
        py::gil_scoped_release release;
        return simulate_trajectories(individuals, steps, params, x, init, rng);
    }, py::arg("individuals"), py::arg("steps"), py::arg("delta_alpha"), py::arg("delta_beta"),
       py::arg("delta_p"), py::arg("sigma2") = 1.0, py::arg("phi") = 0.5, py::arg("seed") = 1,
       py::arg("during_start") = py::none(), py::arg("after_start") = py::none());

    m.def("censor", [](const TrajectorySet& traj, double lambda_obs, double lambda_miss, double p_init,
                       std::uint64_t seed) {
        Rng rng(seed);
        return apply_multilabeling(
            traj, simulate_censoring(traj.individuals(), traj.steps(), lambda_obs, lambda_miss, p_init, rng));
    }, py::arg("trajectories"), py::arg("lambda_obs"), py::arg("lambda_miss"), py::arg("p_init") = 0.5,
       py::arg("seed") = 1, "Censor and relabel; pass float('inf') for a run covering the horizon.");

    m.def("fit", [](const MlmdDataset& data, int iterations, int burn_in, int thin, std::uint64_t seed,
                    const std::string& likelihood, std::optional<int> during_start,
                    std::optional<int> after_start) {
        LikelihoodKind kind = data.uncensored() ? LikelihoodKind::complete : LikelihoodKind::proxy;
        if (likelihood == "proxy") {
            kind = LikelihoodKind::proxy;
        } else if (likelihood == "complete") {
            if (!data.uncensored()) throw std::invalid_argument("the complete likelihood needs uncensored data");
        } else if (likelihood != "auto") {
            throw std::invalid_argument("likelihood must be auto, proxy or complete");
        }
        SamplerConfig config;
        config.iterations = iterations;
        config.burn_in = burn_in;
        config.thin = thin;
        config.seed = seed;
        const auto x = design_for(data.steps(), during_start, after_start);
        PosteriorSamples s;
        {
            py::gil_scoped_release release;
            s = run_chain(data, x, PriorSpec{}, config, kind);
        }
        py::dict out;
        out["names"] = s.names;
        out["draws"] = s.draws;
        out["iterations"] = s.iterations;
        out["acceptance"] = s.acceptance;
        out["likelihood"] = to_string(s.likelihood);
        out["mean_degree"] = mean_degree_curve(s);
        return out;
    }, py::arg("data"), py::arg("iterations") = 4000, py::arg("burn_in") = 2000, py::arg("thin") = 1,
       py::arg("seed") = 1, py::arg("likelihood") = "auto", py::arg("during_start") = py::none(),
       py::arg("after_start") = py::none());

    m.def("transition_log_density", [](const PositionFrame& mu_t, const PositionFrame& mu_prev,
                                       const Eigen::MatrixXi& w_prev, double alpha, double beta, double sigma2) {
        return transition_log_density(mu_t, mu_prev, adjacency_from(w_prev), alpha, beta, sigma2);
    }, py::arg("mu_t"), py::arg("mu_prev"), py::arg("w_prev"), py::arg("alpha"), py::arg("beta"), py::arg("sigma2"));

    m.def("build_precision", [](const Eigen::MatrixXi& w, double alpha) {
        return build_precision(adjacency_from(w), alpha);
    }, py::arg("w"), py::arg("alpha"));

    m.def("build_propagator", [](const Eigen::MatrixXi& w, double beta) {
        return build_propagator(adjacency_from(w), beta);
    }, py::arg("w"), py::arg("beta"));

    m.def("glm_value", [](const Eigen::VectorXd& x, const Eigen::VectorXd& delta) {
        if (x.size() != delta.size()) throw std::invalid_argument("x and delta differ in length");
        return glm_value(x, delta);
    }, py::arg("x"), py::arg("delta"));

    m.def("estimate_lambdas", [](const MlmdDataset& data, int individuals) {
        const auto e = estimate_lambdas(data, individuals);
        py::dict out;
        out["lambda_obs"] = e.lambda_obs;
        out["lambda_miss"] = e.lambda_miss;
        out["mean_labels"] = e.mean_labels;
        out["completed_runs"] = e.completed_runs;
        return out;
    }, py::arg("data"), py::arg("individuals"));

    m.def("t_critical_value", &t_critical_value, py::arg("degrees_of_freedom"));
    m.def("split_rhat", &split_rhat, py::arg("chains"));
    m.def("effective_sample_size", &effective_sample_size, py::arg("chains"));
}
