#include <cmath>
#include <fstream>
#include <sstream>

#include "fracmph/errors.hpp"
#include "fracmph/model_io.hpp"

namespace fracmph {

namespace {

using json = nlohmann::ordered_json;

const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return doc.at(key);
}

double read_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ValidationError(what + " must be a number");
  return v.get<double>();
}

Vector read_vector(const json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + " must be an array of numbers");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = read_number(v[i], what + "[" + std::to_string(i) + "]");
  }
  return out;
}

Matrix read_matrix(const json& v, const std::string& what) {
  if (!v.is_array()) throw ValidationError(what + " must be an array of rows");
  const std::size_t rows = v.size();
  if (rows == 0) return Matrix(0, 0);
  if (!v[0].is_array()) throw ValidationError(what + " must be an array of rows");
  const std::size_t cols = v[0].size();
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row = what + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != cols) {
      throw ValidationError(row + " must have " + std::to_string(cols) + " entries");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          read_number(v[i][j], row + "[" + std::to_string(j) + "]");
    }
  }
  return out;
}

double read_alpha(const json& doc) { return read_number(field(doc, "alpha"), "alpha"); }

MPHAlphaDist univariate(const PHDist& base, double alpha) {
  return MPHAlphaDist(base, Matrix::Ones(base.dim(), 1), alpha);
}

FeedForwardSpec read_feedforward(const json& doc) {
  FeedForwardSpec spec;
  spec.pi = read_vector(field(doc, "pi"), "pi");
  const json& blocks = field(doc, "blocks");
  if (!blocks.is_array()) throw ValidationError("blocks must be an array of {C, D} objects");
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const std::string name = "blocks[" + std::to_string(k) + "]";
    if (!blocks[k].is_object()) throw ValidationError(name + " must be an object");
    FeedForwardBlock b;
    b.C = read_matrix(field(blocks[k], "C"), name + ".C");
    if (blocks[k].contains("D")) b.D = read_matrix(blocks[k].at("D"), name + ".D");
    spec.blocks.push_back(std::move(b));
  }
  return spec;
}

BivariateBlockSpec read_bivariate(const json& doc) {
  const json& b = field(doc, "blocks");
  if (!b.is_object()) throw ValidationError("blocks must be an object with pi1..pi3 and T11..T33");
  BivariateBlockSpec s;
  s.pi1 = read_vector(field(b, "pi1"), "pi1");
  s.pi2 = read_vector(field(b, "pi2"), "pi2");
  s.pi3 = read_vector(field(b, "pi3"), "pi3");
  s.T11 = read_matrix(field(b, "T11"), "T11");
  s.T12 = read_matrix(field(b, "T12"), "T12");
  s.T13 = read_matrix(field(b, "T13"), "T13");
  s.T22 = read_matrix(field(b, "T22"), "T22");
  s.T33 = read_matrix(field(b, "T33"), "T33");
  return s;
}

LoadedModel make_loaded(std::string kind, MPHAlphaDist dist) {
  return LoadedModel{std::move(kind), std::move(dist), std::nullopt, std::nullopt, std::nullopt};
}

}  // namespace

LoadedModel parse_model(const json& doc) {
  if (!doc.is_object()) throw ValidationError("model must be a JSON object");
  const json& kind_field = field(doc, "kind");
  if (!kind_field.is_string()) throw ValidationError("kind must be a string");
  const std::string kind = kind_field.get<std::string>();

  auto pi_t = [&]() {
    return std::pair{read_vector(field(doc, "pi"), "pi"), read_matrix(field(doc, "T"), "T")};
  };

  std::optional<LoadedModel> loaded;
  if (kind == "ph") {
    auto [pi, t] = pi_t();
    loaded = make_loaded(kind, univariate(ph_validate(pi, t), 1.0));
  } else if (kind == "fph") {
    auto [pi, t] = pi_t();
    const double alpha = read_alpha(doc);
    loaded = make_loaded(kind, univariate(ph_validate(pi, t), alpha));
    if (doc.contains("atom")) {
      const double atom = read_number(doc.at("atom"), "atom");
      const double implied = loaded->dist.base().atom();
      if (std::abs(atom - implied) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "atom " << atom << " disagrees with 1 - pi e = " << implied;
        throw ValidationError(msg.str());
      }
    }
  } else if (kind == "mph" || kind == "mpha") {
    auto [pi, t] = pi_t();
    const Matrix r = read_matrix(field(doc, "R"), "R");
    const double alpha = kind == "mph" ? 1.0 : read_alpha(doc);
    if (kind == "mph" && doc.contains("alpha") && read_alpha(doc) != 1.0) {
      throw ValidationError("kind mph has alpha = 1; use kind mpha for alpha < 1");
    }
    loaded = make_loaded(kind, mpha_validate(pi, t, r, alpha));
  } else if (kind == "feedforward") {
    FeedForwardSpec spec = read_feedforward(doc);
    loaded = make_loaded(kind, build_feed_forward(spec, read_alpha(doc)));
    loaded->feedforward = std::move(spec);
  } else if (kind == "bivariate" || kind == "preset") {
    BivariateModel model = [&]() {
      if (kind == "bivariate") return build_bivariate(read_bivariate(doc), read_alpha(doc));
      const json& name = field(doc, "name");
      if (!name.is_string()) throw ValidationError("name must be a string");
      return preset(name.get<std::string>());
    }();
    loaded = make_loaded(kind, model.dist());
    loaded->bivariate = std::move(model);
  } else {
    throw ValidationError("unknown kind '" + kind +
                          "' (expected ph, fph, mph, mpha, feedforward, bivariate or preset)");
  }

  if (doc.contains("nu")) {
    PowerVector nu(read_vector(doc.at("nu"), "nu"));
    if (nu.size() != loaded->dist.components()) {
      throw ValidationError("nu has " + std::to_string(nu.size()) + " entries, the model has " +
                            std::to_string(loaded->dist.components()) + " components");
    }
    loaded->nu = std::move(nu);
  }
  return std::move(*loaded);
}

LoadedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read model file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_model(doc);
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json fph_document(const FracPHDist& d) {
  return {{"kind", "fph"},
          {"alpha", d.alpha()},
          {"pi", vector_to_json(d.base().pi())},
          {"T", matrix_to_json(d.base().T())},
          {"atom", d.base().atom()}};
}

}  // namespace fracmph
