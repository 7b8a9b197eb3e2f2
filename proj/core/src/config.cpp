#include "tout/config.hpp"

#include <cmath>
#include <string>

#include "tout/error.hpp"
#include "tout/transcript.hpp"

namespace tout {

void SearchConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid search config: ") + what);
  };
  require(k >= 1, "k must be positive");
  require(b >= 1, "b must be positive");
  require(steps >= 0, "steps must be non-negative");
  require(m >= 1, "m must be positive");
  require(std::isfinite(t_min) && std::isfinite(t_max), "temperatures must be finite");
  require(0.0 <= t_min && t_min <= t_max, "need 0 <= t_min <= t_max");
  require(t_max <= 2.0, "t_max must not exceed 2");
  require(!std::isnan(v_th), "v_th must be a number");
  require(u_th > 0.0, "u_th must be positive");
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be positive");
  require(max_outputs >= 1, "max_outputs must be positive");
  require(propose_temperature >= 0.0 && propose_temperature <= 2.0, "propose_temperature out of [0, 2]");
  require(final_temperature >= 0.0 && final_temperature <= 2.0, "final_temperature out of [0, 2]");
  require(max_tokens >= 1, "max_tokens must be positive");
  require(n_chains >= 1, "n_chains must be positive");
  require(eval_jobs >= 1, "eval_jobs must be positive");
}

void to_json(nlohmann::json& j, const SearchConfig& c) {
  j = nlohmann::json{
      {"k", c.k},
      {"b", c.b},
      {"steps", c.steps},
      {"m", c.m},
      {"t_min", c.t_min},
      {"t_max", c.t_max},
      {"v_th", number_to_json(c.v_th)},
      {"u_th", number_to_json(c.u_th)},
      {"epsilon", c.epsilon},
      {"luq_enabled", c.luq_enabled},
      {"ugs_enabled", c.ugs_enabled},
      {"seed", c.seed},
      {"max_outputs", c.max_outputs},
      {"propose_temperature", c.propose_temperature},
      {"final_temperature", c.final_temperature},
      {"two_pass_value", c.two_pass_value},
      {"max_tokens", c.max_tokens},
      {"n_chains", c.n_chains},
  };
}

void from_json(const nlohmann::json& j, SearchConfig& c) {
  SearchConfig d;
  c.k = j.value("k", d.k);
  c.b = j.value("b", d.b);
  c.steps = j.value("steps", d.steps);
  c.m = j.value("m", d.m);
  c.t_min = j.value("t_min", d.t_min);
  c.t_max = j.value("t_max", d.t_max);
  c.v_th = j.contains("v_th") ? number_from_json(j.at("v_th")) : d.v_th;
  c.u_th = j.contains("u_th") ? number_from_json(j.at("u_th")) : d.u_th;
  c.epsilon = j.value("epsilon", d.epsilon);
  c.luq_enabled = j.value("luq_enabled", d.luq_enabled);
  c.ugs_enabled = j.value("ugs_enabled", d.ugs_enabled);
  c.seed = j.value("seed", d.seed);
  c.max_outputs = j.value("max_outputs", d.max_outputs);
  c.propose_temperature = j.value("propose_temperature", d.propose_temperature);
  c.final_temperature = j.value("final_temperature", d.final_temperature);
  c.two_pass_value = j.value("two_pass_value", d.two_pass_value);
  c.max_tokens = j.value("max_tokens", d.max_tokens);
  c.n_chains = j.value("n_chains", d.n_chains);
}

}  // namespace tout
