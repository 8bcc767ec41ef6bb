#include "mlab/catalog.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace mlab {

namespace {

using nlohmann::json;

Vec vec_from_json(const json& j, int dim) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw std::invalid_argument("catalog: expected a length-" + std::to_string(dim) + " array");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = j.at(i).get<double>();
  return v;
}

AlphaParam alpha_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return AlphaParam::infinity();
    throw std::invalid_argument("catalog: alpha must be a number or \"inf\"");
  }
  return AlphaParam::finite(j.get<double>());
}

AlphaConcaveFunction function_from_json(const json& entry) {
  const int dim = entry.at("dim").get<int>();
  const AlphaParam alpha = alpha_from_json(entry.at("alpha"));
  const std::string kind = entry.at("kind").get<std::string>();
  const json params = entry.value("params", json::object());
  const AlphaParam ta = alpha.is_inf() ? AlphaParam::finite(0.0) : alpha;

  auto height_offset = [&](double fallback) {
    if (!params.contains("height")) return fallback;
    double h = params.at("height").get<double>();
    if (!(h > 0.0)) throw std::invalid_argument("catalog: height must be positive");
    return base_level_of_value(ta, h);
  };

  if (kind == "quadratic") {
    QuadraticBase q;
    q.Q = Mat::Identity(dim, dim);
    if (params.contains("Q")) {
      const json& Q = params.at("Q");
      if (Q.is_number()) {
        q.Q(0, 0) = Q.get<double>();
      } else if (dim == 1) {
        q.Q(0, 0) = Q.at(0).is_array() ? Q.at(0).at(0).get<double>() : Q.at(0).get<double>();
      } else {
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) q.Q(i, j) = Q.at(i).at(j).get<double>();
      }
    }
    q.center = params.contains("center") ? vec_from_json(params.at("center"), dim)
                                         : Vec(Vec::Zero(dim));
    q.offset = params.value("offset", 0.0);
    return function_of_base(alpha, std::move(q));
  }
  if (kind == "cone") {
    if (params.contains("rate")) {
      RadialConeBase r;
      r.rate = params.at("rate").get<double>();
      r.offset = params.value("offset", 0.0);
      r.dim = dim;
      return function_of_base(alpha, std::move(r));
    }
    ConeBase c;
    c.center = params.contains("center") ? vec_from_json(params.at("center"), dim)
                                         : Vec(Vec::Zero(dim));
    c.offset = params.value("offset", 0.0);
    for (const auto& g : params.at("gradients")) c.gradients.push_back(vec_from_json(g, dim));
    if (params.contains("domain")) {
      for (const auto& h : params.at("domain"))
        c.domain.push_back(
            HalfSpace{vec_from_json(h.at("normal"), dim), h.at("offset").get<double>()});
    }
    return function_of_base(alpha, std::move(c));
  }
  if (kind == "indicator_polytope") {
    PolytopeIndicatorBase p;
    for (const auto& v : params.at("vertices")) p.vertices.push_back(vec_from_json(v, dim));
    p.offset = height_offset(0.0);
    return function_of_base(alpha, std::move(p));
  }
  if (kind == "indicator_ball") {
    BallIndicatorBase b;
    b.radius = params.at("radius").get<double>();
    b.offset = height_offset(0.0);
    b.dim = dim;
    return function_of_base(alpha, std::move(b));
  }
  if (kind == "piecewise_affine") {
    std::vector<EpiPoint> pts;
    for (const auto& p : params.at("points"))
      pts.push_back({vec_from_json(p.at("x"), dim), p.at("t").get<double>()});
    auto lin = std::make_shared<InnerLinearization>(inner_linearization(std::move(pts), true));
    return function_of_base(alpha, PiecewiseAffineBase{std::move(lin)});
  }
  if (kind == "grid") {
    if (params.contains("file")) {
      const std::string path = params.at("file").get<std::string>();
      GridFunction g = path.size() > 5 && path.substr(path.size() - 5) == ".json"
                           ? GridFunction::from_json([&] {
                               std::ifstream in(path);
                               if (!in) throw std::runtime_error("catalog: cannot open " + path);
                               std::stringstream ss;
                               ss << in.rdbuf();
                               return ss.str();
                             }())
                           : GridFunction::load_binary(path);
      return function_of_base(alpha, GridBase{std::make_shared<GridFunction>(std::move(g))});
    }
    Box box;
    box.lo = vec_from_json(params.at("lo"), dim);
    box.hi = vec_from_json(params.at("hi"), dim);
    GridFunction g(box, params.at("resolution").get<std::vector<std::int64_t>>(),
                   params.at("values").get<std::vector<double>>());
    return function_of_base(alpha, GridBase{std::make_shared<GridFunction>(std::move(g))});
  }
  throw std::invalid_argument("catalog: unknown kind '" + kind + "'");
}

json builtin_entries() {
  static const json catalog = {
      {"gauss_1d",
       {{"alpha", 0.0}, {"kind", "quadratic"}, {"dim", 1}, {"params", json::object()}}},
      {"gauss_1d_shifted",
       {{"alpha", 0.0},
        {"kind", "quadratic"},
        {"dim", 1},
        {"params", {{"center", {0.8}}}}}},
      {"gauss_2d",
       {{"alpha", 0.0}, {"kind", "quadratic"}, {"dim", 2}, {"params", json::object()}}},
      {"gauss_2d_shifted",
       {{"alpha", 0.0},
        {"kind", "quadratic"},
        {"dim", 2},
        {"params", {{"center", {0.5, -0.3}}}}}},
      {"gauss_2d_sheared",
       {{"alpha", 0.0},
        {"kind", "quadratic"},
        {"dim", 2},
        {"params", {{"Q", {{1.3, 0.6}, {0.6, 1.1}}}, {"center", {0.4, 0.2}}}}}},
      {"gauss_2d_asym",
       {{"alpha", 0.0},
        {"kind", "quadratic"},
        {"dim", 2},
        {"params", {{"Q", {{1.0, 0.45}, {0.45, 0.8}}}, {"center", {0.6, -0.4}}}}}},
      {"gauss_2d_aniso",
       {{"alpha", 0.0},
        {"kind", "quadratic"},
        {"dim", 2},
        {"params", {{"Q", {{1.0, 0.0}, {0.0, 4.0}}}}}}},
      {"exp_1d_onesided",
       {{"alpha", 0.0},
        {"kind", "cone"},
        {"dim", 1},
        {"params",
         {{"gradients", {{1.0}}}, {"domain", {{{"normal", {-1.0}}, {"offset", 0.0}}}}}}}},
      {"exp_1d_symmetric",
       {{"alpha", 0.0},
        {"kind", "cone"},
        {"dim", 1},
        {"params", {{"gradients", {{1.0}, {-1.0}}}}}}},
      {"cone_1d_asym",
       {{"alpha", 0.0},
        {"kind", "cone"},
        {"dim", 1},
        {"params", {{"gradients", {{2.0}, {-0.5}}}}}}},
      {"tent_1d_asym",
       {{"alpha", 1.0},
        {"kind", "cone"},
        {"dim", 1},
        {"params", {{"gradients", {{1.6}, {-0.7}}}}}}},
      {"tent_1d",
       {{"alpha", 1.0},
        {"kind", "cone"},
        {"dim", 1},
        {"params", {{"gradients", {{1.0}, {-1.0}}}}}}},
      {"cone_2d_skew",
       {{"alpha", 0.0},
        {"kind", "cone"},
        {"dim", 2},
        {"params",
         {{"gradients", {{1.0, 0.3}, {-0.8, 0.5}, {0.1, -0.9}, {-0.3, -0.4}}}}}}},
      {"tri_2d_skewed",
       {{"alpha", "inf"},
        {"kind", "indicator_polytope"},
        {"dim", 2},
        {"params", {{"vertices", {{-0.3, -0.2}, {1.7, 0.1}, {0.2, 1.3}}}}}}},
      {"square_unit",
       {{"alpha", "inf"},
        {"kind", "indicator_polytope"},
        {"dim", 2},
        {"params", {{"vertices", {{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}}}}}},
      {"square_side2",
       {{"alpha", "inf"},
        {"kind", "indicator_polytope"},
        {"dim", 2},
        {"params", {{"vertices", {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}}}}}}},
      {"square_area_pi",
       {{"alpha", "inf"},
        {"kind", "indicator_polytope"},
        {"dim", 2},
        {"params",
         {{"vertices",
           {{-0.88622692545275801, -0.88622692545275801},
            {0.88622692545275801, -0.88622692545275801},
            {0.88622692545275801, 0.88622692545275801},
            {-0.88622692545275801, 0.88622692545275801}}}}}}},
      {"interval_unit",
       {{"alpha", "inf"},
        {"kind", "indicator_polytope"},
        {"dim", 1},
        {"params", {{"vertices", {{-1.0}, {1.0}}}}}}},
      {"disk_unit",
       {{"alpha", "inf"}, {"kind", "indicator_ball"}, {"dim", 2}, {"params", {{"radius", 1.0}}}}},
      {"invquad_1d",
       {{"alpha", -1.0}, {"kind", "quadratic"}, {"dim", 1}, {"params", json::object()}}},
      {"negquad_2d",
       {{"alpha", -0.5}, {"kind", "quadratic"}, {"dim", 2}, {"params", json::object()}}},
      {"tent_2d",
       {{"alpha", 1.0},
        {"kind", "cone"},
        {"dim", 2},
        {"params", {{"gradients", {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}}}}}},
  };
  return catalog;
}

}  // namespace

AlphaConcaveFunction function_from_json_text(const std::string& text) {
  return function_from_json(json::parse(text));
}

std::string function_to_json_text(const AlphaConcaveFunction& f) {
  json j;
  j["alpha"] = f.alpha().is_inf() ? json("inf") : json(f.alpha().value());
  j["dim"] = f.dim();
  json params = json::object();
  if (auto* q = std::get_if<QuadraticBase>(&f.base())) {
    j["kind"] = "quadratic";
    if (f.dim() == 1)
      params["Q"] = {q->Q(0, 0)};
    else
      params["Q"] = {{q->Q(0, 0), q->Q(0, 1)}, {q->Q(1, 0), q->Q(1, 1)}};
    params["center"] = std::vector<double>(q->center.data(), q->center.data() + f.dim());
    params["offset"] = q->offset;
  } else if (auto* c = std::get_if<ConeBase>(&f.base())) {
    j["kind"] = "cone";
    params["center"] = std::vector<double>(c->center.data(), c->center.data() + f.dim());
    params["offset"] = c->offset;
    json grads = json::array();
    for (const auto& g : c->gradients)
      grads.push_back(std::vector<double>(g.data(), g.data() + f.dim()));
    params["gradients"] = grads;
    if (!c->domain.empty()) {
      json dom = json::array();
      for (const auto& h : c->domain)
        dom.push_back({{"normal", std::vector<double>(h.normal.data(), h.normal.data() + f.dim())},
                       {"offset", h.offset}});
      params["domain"] = dom;
    }
  } else if (auto* r = std::get_if<RadialConeBase>(&f.base())) {
    j["kind"] = "cone";
    params["rate"] = r->rate;
    params["offset"] = r->offset;
  } else if (auto* p = std::get_if<PolytopeIndicatorBase>(&f.base())) {
    j["kind"] = "indicator_polytope";
    json verts = json::array();
    for (const auto& v : p->vertices)
      verts.push_back(std::vector<double>(v.data(), v.data() + f.dim()));
    params["vertices"] = verts;
    params["height"] = f.max_value();
  } else if (auto* b = std::get_if<BallIndicatorBase>(&f.base())) {
    j["kind"] = "indicator_ball";
    params["radius"] = b->radius;
    params["height"] = f.max_value();
  } else if (auto* w = std::get_if<PiecewiseAffineBase>(&f.base())) {
    j["kind"] = "piecewise_affine";
    json pts = json::array();
    for (const auto& bp : w->lin->breakPoints)
      pts.push_back({{"x", std::vector<double>(bp.x.data(), bp.x.data() + f.dim())},
                     {"t", bp.t}});
    params["points"] = pts;
  } else if (auto* g = std::get_if<GridBase>(&f.base())) {
    j["kind"] = "grid";
    json grid = json::parse(g->grid->to_json());
    params["lo"] = grid["lo"];
    params["hi"] = grid["hi"];
    params["resolution"] = grid["resolution"];
    params["values"] = grid["values"];
  } else if (auto* r = std::get_if<RadialProfileBase>(&f.base())) {
    j["kind"] = "radial_profile";
    params["radii"] = r->radii;
    params["values"] = r->values;
  }
  j["params"] = params;
  return j.dump();
}

std::vector<std::string> catalog_ids() {
  std::vector<std::string> ids;
  for (auto it = builtin_entries().begin(); it != builtin_entries().end(); ++it)
    ids.push_back(it.key());
  return ids;
}

bool catalog_has(const std::string& id) { return builtin_entries().contains(id); }

AlphaConcaveFunction catalog_function(const std::string& id) {
  const json& cat = builtin_entries();
  if (!cat.contains(id)) throw std::invalid_argument("catalog: unknown function id '" + id + "'");
  AlphaConcaveFunction f = function_from_json(cat.at(id));
  f.set_name(id);
  return f;
}

}  // namespace mlab
