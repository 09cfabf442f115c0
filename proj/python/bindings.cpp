#include "cgeom/density.hpp"
#include "cgeom/dpi.hpp"
#include "cgeom/experiment.hpp"
#include "cgeom/geometry.hpp"
#include "cgeom/information.hpp"
#include "cgeom/mdp.hpp"
#include "cgeom/optima.hpp"
#include "cgeom/policy_optim.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace cgeom;

namespace {

Policy policy_or_uniform(const FiniteMdp& mdp, const std::optional<Matrix>& table) {
  return table ? Policy(*table) : Policy::uniform(mdp.num_states(), mdp.num_actions());
}

py::dict sweep_row(const SweepRow& r) {
  py::dict d;
  d["alpha"] = r.alpha;
  d["beta"] = r.beta;
  d["state"] = r.state;
  d["probability"] = r.probability;
  d["return_value"] = r.return_value;
  d["divergence_to_uniform"] = r.divergence_to_uniform;
  d["geodesic_residual"] = r.geodesic_residual;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "C++ core of curiosity_geom";

  static py::exception<ConvergenceError> convergence(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConvergenceError& e) {
      py::set_error(convergence, e.what());
    } catch (const InvalidArgument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  m.def("kl_divergence", &kl_divergence, py::arg("p"), py::arg("q"));
  m.def("alpha_divergence", py::overload_cast<const Vector&, const Vector&, double>(&alpha_divergence),
        py::arg("p"), py::arg("q"), py::arg("alpha"));
  m.def("renyi_divergence", py::overload_cast<const Vector&, const Vector&, double>(&renyi_divergence),
        py::arg("p"), py::arg("q"), py::arg("order"));
  m.def(
      "geodesic",
      [](const Vector& p, const Vector& q, double order, double t, bool normalized) {
        return geodesic_eval({p, q, order, normalized, false}, t);
      },
      py::arg("p"), py::arg("q"), py::arg("order"), py::arg("t"), py::arg("normalized") = false);
  m.def("alpha_information", py::overload_cast<double, double>(&alpha_information),
        py::arg("probability"), py::arg("alpha"));
  m.def(
      "shannon_entropy", [](const Vector& p) { return shannon_entropy(Distribution(p)); },
      py::arg("p"));

  py::class_<FiniteMdp>(m, "FiniteMdp")
      .def(py::init<std::vector<Matrix>, Vector, Vector, int>(), py::arg("transitions"),
           py::arg("start"), py::arg("reward"), py::arg("horizon"),
           "transitions[a][s, s'] is the probability of s -> s' under action a")
      .def_property_readonly("num_states", &FiniteMdp::num_states)
      .def_property_readonly("num_actions", &FiniteMdp::num_actions)
      .def_property_readonly("horizon", &FiniteMdp::horizon)
      .def_property_readonly("reward", &FiniteMdp::reward)
      .def("with_reward", &FiniteMdp::with_reward, py::arg("reward"));
  m.def("teleport_mdp", &teleport_mdp, py::arg("states"), py::arg("horizon"));

  m.def(
      "occupancy",
      [](const FiniteMdp& mdp, const std::optional<Matrix>& policy) {
        return occupancy(mdp, policy_or_uniform(mdp, policy)).dist.weights();
      },
      py::arg("mdp"), py::arg("policy") = py::none());
  m.def(
      "augmented_stationary",
      [](const FiniteMdp& mdp, const std::optional<Matrix>& policy) {
        const StationaryResult r = augmented_stationary(mdp, policy_or_uniform(mdp, policy));
        return py::make_tuple(r.augmented, Vector(r.marginal.weights()), r.residual);
      },
      py::arg("mdp"), py::arg("policy") = py::none(),
      "Returns (augmented distribution, state marginal, residual).");
  m.def(
      "rollout_return",
      [](const FiniteMdp& mdp, std::int64_t episodes, std::uint64_t seed,
         const std::optional<Matrix>& policy) {
        const ReturnEstimate e = rollout_return(mdp, policy_or_uniform(mdp, policy), episodes, seed);
        return py::make_tuple(e.mean, e.standard_error);
      },
      py::arg("mdp"), py::arg("episodes"), py::arg("seed") = 0, py::arg("policy") = py::none());

  m.def(
      "closed_form_optimum",
      [](const Vector& reward, double alpha, double beta, int horizon) {
        return closed_form_optimum({reward, alpha, beta, horizon}).point.weights();
      },
      py::arg("reward"), py::arg("alpha"), py::arg("beta"), py::arg("horizon") = 0);
  m.def(
      "numerical_optimum",
      [](const Vector& reward, double alpha, double beta, double tol, std::uint64_t seed) {
        return numerical_optimum({reward, alpha, beta, 0}, tol, seed).point.weights();
      },
      py::arg("reward"), py::arg("alpha"), py::arg("beta"), py::arg("tol") = 1e-12,
      py::arg("seed") = 0);
  m.def(
      "gibbs_distribution",
      [](const Vector& reward, double beta) { return gibbs_distribution(reward, beta).weights(); },
      py::arg("reward"), py::arg("beta"));
  m.def(
      "beta_sweep_residual",
      [](const Vector& reward, double alpha, const std::vector<double>& betas) {
        return beta_sweep({reward, alpha, 1.0, 0}, betas).max_residual;
      },
      py::arg("reward"), py::arg("alpha"), py::arg("betas"));
  m.def(
      "sweep_table",
      [](const Vector& reward, const std::vector<double>& alphas, const std::vector<double>& betas,
         int horizon) {
        py::list rows;
        for (const SweepRow& r : sweep_table(reward, horizon, alphas, betas)) rows.append(sweep_row(r));
        return rows;
      },
      py::arg("reward"), py::arg("alphas"), py::arg("betas"), py::arg("horizon") = 0);

  m.def(
      "dpi_gap",
      [](const Vector& p, const std::vector<Index>& assignment, double alpha, int horizon) {
        return dpi_gap(Distribution(p), Statistic(assignment), Generator::alpha_information(alpha),
                       horizon);
      },
      py::arg("p"), py::arg("assignment"), py::arg("alpha"), py::arg("horizon") = 0);
  m.def(
      "sufficient",
      [](const Vector& p, const std::vector<Index>& assignment) {
        return sufficiency_check(Distribution(p), Statistic(assignment));
      },
      py::arg("p"), py::arg("assignment"));

  m.def(
      "knn_density",
      [](const Matrix& samples, const Vector& query, std::optional<Index> k) {
        const SampleSet s(samples);
        return knn_density(s, query, k.value_or(default_neighbours(s.size()))).density;
      },
      py::arg("samples"), py::arg("query"), py::arg("k") = py::none());

  m.def(
      "teleport_optimum",
      [](const Vector& reward, double alpha, double beta, int horizon) {
        const TeleportOptimum t =
            teleport_optimum({reward, beta, Generator::alpha_information(alpha), false}, horizon);
        return py::make_tuple(Vector(t.occupancy.weights()), t.objective);
      },
      py::arg("reward"), py::arg("alpha"), py::arg("beta"), py::arg("horizon"));
  m.def(
      "natural_ascent",
      [](const FiniteMdp& mdp, double alpha, double beta, std::int64_t iterations,
         const std::string& method, const std::optional<Matrix>& logits) {
        const RewardSpec spec{mdp.reward(), beta, Generator::alpha_information(alpha), false};
        AscentOptions opts;
        opts.max_iterations = iterations;
        if (method == "vanilla") {
          opts.method = AscentMethod::vanilla;
        } else if (method != "natural") {
          throw InvalidArgument("method must be 'natural' or 'vanilla'");
        }
        const SoftmaxPolicy start =
            logits ? SoftmaxPolicy(*logits) : SoftmaxPolicy::uniform(mdp.num_states(), mdp.num_actions());
        std::optional<AscentResult> result;
        {
          py::gil_scoped_release release;
          result.emplace(run_ascent(mdp, start, spec, opts));
        }
        const AscentResult& r = *result;
        std::vector<double> objective;
        for (const TraceRow& row : r.trace) objective.push_back(row.objective);
        return py::make_tuple(r.final_state.policy.policy().table(), objective);
      },
      py::arg("mdp"), py::arg("alpha"), py::arg("beta"), py::arg("iterations") = 200,
      py::arg("method") = "natural", py::arg("logits") = py::none(),
      "Returns (final policy table, objective trace).");

  m.def(
      "verify",
      [](std::uint64_t seed, const std::string& only) {
        ExperimentConfig c;
        c.seed = seed;
        c.only = only;
        validate_config(c);
        std::vector<CheckResult> results;
        {
          py::gil_scoped_release release;
          results = verify_suite(c);
        }
        py::list out;
        for (const CheckResult& r : results) {
          py::dict d;
          d["name"] = r.name;
          d["residual"] = r.residual;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          d["error"] = r.error;
          out.append(d);
        }
        return out;
      },
      py::arg("seed") = 0, py::arg("only") = "");
}
