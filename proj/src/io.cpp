#include "ptn/io.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace ptn {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(where + "." + key + ": missing");
  return *it;
}

std::int64_t as_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

std::vector<std::int64_t> as_ints(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_int(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

std::string where_of(const char* list, std::size_t i) { return std::string(list) + "[" + std::to_string(i) + "]"; }

}  // namespace

std::string network_to_string(const TensorNetwork& g) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json vs = json::array();
  for (const auto& [id, t] : g.tensors())
    vs.push_back({{"id", id}, {"labels", t.labels()}, {"sizes", t.dims()}, {"data", t.data()}});
  doc["vertices"] = vs;
  json es = json::array();
  for (const auto& [l, e] : g.edges()) {
    json ends = e.dangling() ? json::array({e.u}) : json::array({e.u, e.v});
    es.push_back({{"label", l}, {"size", e.size}, {"endpoints", ends}});
  }
  doc["edges"] = es;
  return doc.dump(1);
}

TensorNetwork network_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
  const std::int64_t version = as_int(field(doc, "format_version", "document"), "format_version");
  if (version != kFormatVersion) throw ParseError("format_version: unsupported value " + std::to_string(version));

  const json& vs = field(doc, "vertices", "document");
  if (!vs.is_array()) throw ParseError("vertices: expected an array");
  TensorNetwork g;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const std::string w = where_of("vertices", i);
    const std::int64_t id = as_int(field(vs[i], "id", w), w + ".id");
    if (id < 0) throw ParseError(w + ".id: must be nonnegative");
    if (g.contains(id)) throw ParseError(w + ".id: duplicate id " + std::to_string(id));
    std::vector<Label> labels = as_ints(field(vs[i], "labels", w), w + ".labels");
    std::vector<Dim> sizes = as_ints(field(vs[i], "sizes", w), w + ".sizes");
    if (labels.size() != sizes.size()) throw ParseError(w + ".sizes: length differs from labels");
    const json& data = field(vs[i], "data", w);
    if (!data.is_array()) throw ParseError(w + ".data: expected an array");
    Buffer values;
    values.reserve(data.size());
    for (const json& x : data) {
      if (!x.is_number()) throw ParseError(w + ".data: expected numbers");
      values.push_back(x.get<double>());
    }
    try {
      g.put(id, Tensor(labels, sizes, std::move(values)));
    } catch (const Error& e) {
      throw ParseError(w + ": " + e.what());
    }
  }

  std::map<Label, EdgeInfo> actual;
  try {
    actual = g.edges();
  } catch (const Error& e) {
    throw ParseError(std::string("vertices: ") + e.what());
  }

  const json& es = field(doc, "edges", "document");
  if (!es.is_array()) throw ParseError("edges: expected an array");
  std::set<Label> listed;
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string w = where_of("edges", i);
    const Label l = as_int(field(es[i], "label", w), w + ".label");
    if (!listed.insert(l).second) throw ParseError(w + ".label: duplicate label " + std::to_string(l));
    auto it = actual.find(l);
    if (it == actual.end()) throw ParseError(w + ".label: no vertex holds label " + std::to_string(l));
    const EdgeInfo& e = it->second;
    std::vector<std::int64_t> ends = as_ints(field(es[i], "endpoints", w), w + ".endpoints");
    std::set<std::int64_t> want = {e.u};
    if (!e.dangling()) want.insert(e.v);
    if (ends.size() != want.size() || std::set<std::int64_t>(ends.begin(), ends.end()) != want)
      throw ParseError(w + ".endpoints: do not match the vertices holding label " + std::to_string(l));
    if (es[i].contains("size")) {
      const Dim sz = as_int(es[i]["size"], w + ".size");
      if (sz != e.size) throw ParseError(w + ".size: " + std::to_string(sz) + " differs from mode size " +
                                         std::to_string(e.size));
    }
  }
  if (listed.size() != actual.size()) throw ParseError("edges: some labels held by vertices are not listed");
  return g;
}

void save_network(const TensorNetwork& g, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error("cannot open " + path + " for writing");
  f << network_to_string(g) << '\n';
  if (!f) throw Error("failed writing " + path);
}

TensorNetwork load_network(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return network_from_string(ss.str());
}

const std::vector<std::string>& report_fields() {
  static const std::vector<std::string> fields = {
      "format_version", "model",  "dims",  "beta",      "alpha", "ansatz",  "chi",
      "partition_size", "swap_batch", "seed", "closed", "sign",  "ln_z", "rel_error",
      "flops",          "seconds", "analysis_seconds"};
  return fields;
}

std::string report_json(const Report& r) {
  // ordered_json keeps the documented field order.
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["model"] = r.model;
  j["dims"] = r.dims;
  j["beta"] = r.beta;
  j["alpha"] = r.alpha;
  j["ansatz"] = r.ansatz;
  j["chi"] = r.chi;
  j["partition_size"] = r.partition_size;
  j["swap_batch"] = r.swap_batch;
  j["seed"] = r.seed;
  j["closed"] = r.closed;
  j["sign"] = r.sign;
  j["ln_z"] = r.ln_z;
  if (r.rel_error) j["rel_error"] = *r.rel_error;
  j["flops"] = r.flops;
  j["seconds"] = r.seconds;
  j["analysis_seconds"] = r.analysis_seconds;
  return j.dump();
}

std::string report_csv_header() {
  std::string s;
  for (const auto& f : report_fields()) s += (s.empty() ? "" : ",") + f;
  return s;
}

std::string report_csv_row(const Report& r) {
  std::ostringstream o;
  o.precision(17);
  std::string dims;
  for (int d : r.dims) dims += (dims.empty() ? "" : "x") + std::to_string(d);
  o << kFormatVersion << ',' << r.model << ',' << dims << ',' << r.beta << ',' << r.alpha << ',' << r.ansatz << ','
    << r.chi << ',' << r.partition_size << ',' << r.swap_batch << ',' << r.seed << ',' << (r.closed ? 1 : 0) << ','
    << r.sign << ',' << r.ln_z << ',';
  if (r.rel_error) o << *r.rel_error;
  o << ',' << r.flops << ',' << r.seconds << ',' << r.analysis_seconds;
  return o.str();
}

}  // namespace ptn
