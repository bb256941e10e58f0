#include "dlasso/report_io.hpp"

#include <json.hpp>
#include <sstream>

#include "dlasso/csv.hpp"
#include "dlasso/errors.hpp"

namespace dlasso {

namespace {

void append_json_string(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += ch;
    }
  }
  out += '"';
}

}  // namespace

std::string report_to_json(const InferenceReport& report) {
  std::string out;
  out.reserve(256 + report.coords.size() * 256);
  out += "{\n";
  out += "  \"alpha\": " + format_double(report.alpha) + ",\n";
  out += "  \"method\": ";
  append_json_string(out, report.method);
  out += ",\n";
  out += "  \"sigma_hat\": " + format_double(report.sigma_hat) + ",\n";
  out += "  \"coords\": [\n";
  for (size_t i = 0; i < report.coords.size(); ++i) {
    const CoordinateInference& c = report.coords[i];
    out += "    {\"index\": " + std::to_string(c.index) + ", \"name\": ";
    append_json_string(out, c.name);
    out += ", \"estimate\": " + format_double(c.estimate);
    out += ", \"se\": " + format_double(c.se);
    out += ", \"ci_lower\": " + format_double(c.ci_lower);
    out += ", \"ci_upper\": " + format_double(c.ci_upper);
    out += ", \"p_value\": " + format_double(c.p_value);
    out += ", \"p_adj\": " + format_double(c.p_adj);
    out += ", \"reject\": ";
    out += c.reject ? "true" : "false";
    out += ", \"reject_fwer\": ";
    out += c.reject_fwer ? "true" : "false";
    out += "}";
    if (i + 1 < report.coords.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n";
  out += "}\n";
  return out;
}

std::string report_to_csv(const InferenceReport& report) {
  std::string out =
      "index,name,estimate,se,ci_lower,ci_upper,p_value,p_adj,reject,"
      "reject_fwer\n";
  for (const CoordinateInference& c : report.coords) {
    out += std::to_string(c.index) + "," + c.name + "," +
           format_double(c.estimate) + "," + format_double(c.se) + "," +
           format_double(c.ci_lower) + "," + format_double(c.ci_upper) + "," +
           format_double(c.p_value) + "," + format_double(c.p_adj) + "," +
           (c.reject ? "true" : "false") + "," +
           (c.reject_fwer ? "true" : "false") + "\n";
  }
  return out;
}

InferenceReport report_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  try {
    InferenceReport report;
    report.alpha = doc.at("alpha").get<double>();
    report.method = doc.at("method").get<std::string>();
    report.sigma_hat = doc.at("sigma_hat").get<double>();
    for (const auto& item : doc.at("coords")) {
      CoordinateInference c;
      c.index = item.at("index").get<int>();
      c.name = item.value("name", "x" + std::to_string(c.index));
      c.estimate = item.at("estimate").get<double>();
      c.se = item.at("se").get<double>();
      c.ci_lower = item.at("ci_lower").get<double>();
      c.ci_upper = item.at("ci_upper").get<double>();
      c.p_value = item.at("p_value").get<double>();
      c.p_adj = item.at("p_adj").get<double>();
      c.reject = item.at("reject").get<bool>();
      c.reject_fwer = item.at("reject_fwer").get<bool>();
      report.coords.push_back(std::move(c));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("report JSON schema: ") + e.what());
  }
}

}  // namespace dlasso
