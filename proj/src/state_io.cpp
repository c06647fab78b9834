#include "entgap/state_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace entgap {

PureState parse_state(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("state file: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("dims") || !doc.contains("amplitudes"))
    throw InputError("state file: expected an object with 'dims' and 'amplitudes'");

  const auto& jd = doc["dims"];
  if (!jd.is_array()) throw InputError("state file: 'dims' must be an integer array");
  std::vector<Index> dims;
  for (const auto& d : jd) {
    if (!d.is_number_integer()) throw InputError("state file: 'dims' must be an integer array");
    dims.push_back(d.get<Index>());
  }
  FactorShape shape(std::move(dims));

  const auto& ja = doc["amplitudes"];
  if (!ja.is_array() || static_cast<Index>(ja.size()) != shape.total())
    throw InputError("state file: expected " + std::to_string(shape.total()) + " amplitudes");
  Eigen::VectorXcd amps(shape.total());
  for (Index k = 0; k < shape.total(); ++k) {
    const auto& pair = ja[static_cast<std::size_t>(k)];
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
      throw InputError("state file: amplitude " + std::to_string(k) + " is not a [re, im] pair");
    amps(k) = {pair[0].get<double>(), pair[1].get<double>()};
  }

  const double norm = amps.norm();
  if (!(std::abs(norm - 1.0) <= kLoadNormTolerance))
    throw InputError("state file: amplitudes have norm " + describe_value(norm) + ", expected 1");
  return PureState::normalized(std::move(shape), std::move(amps));
}

PureState load_state(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open state file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_state(buffer.str());
}

std::string dump_state(const PureState& psi) {
  nlohmann::json doc;
  doc["dims"] = psi.shape().dims();
  auto& amps = doc["amplitudes"] = nlohmann::json::array();
  for (Index k = 0; k < psi.dimension(); ++k) amps.push_back({psi[k].real(), psi[k].imag()});
  return doc.dump();
}

void save_state(const PureState& psi, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write state file " + path.string());
  out << dump_state(psi) << '\n';
}

}  // namespace entgap
