#include "pentahelix/report.hpp"

#include <sstream>

#include "pentahelix/curve_file.hpp"

namespace pentahelix::io {

namespace {

/// Minimal ordered JSON writer; the schema is small enough that a hand-rolled
/// emitter keeps number formatting (and therefore bytes) under control.
class Json {
 public:
  Json& obj_open(const std::string& key = {}) { return open('{', key); }
  Json& obj_close() { return close('}'); }
  Json& arr_open(const std::string& key = {}) { return open('[', key); }
  Json& arr_close() { return close(']'); }

  Json& field(const std::string& key, double v) {
    sep();
    out_ << '"' << key << "\":" << number(v);
    return *this;
  }
  Json& field(const std::string& key, bool v) {
    sep();
    out_ << '"' << key << "\":" << (v ? "true" : "false");
    return *this;
  }
  Json& field(const std::string& key, const std::string& v) {
    sep();
    out_ << '"' << key << "\":\"" << v << '"';
    return *this;
  }
  Json& field(const std::string& key, long long v) {
    sep();
    out_ << '"' << key << "\":" << v;
    return *this;
  }
  Json& element(double v) {
    sep();
    out_ << number(v);
    return *this;
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string number(double v) {
    if (std::isnan(v)) return "\"nan\"";
    if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
    return format_number(v);
  }
  Json& open(char c, const std::string& key) {
    sep();
    if (!key.empty()) out_ << '"' << key << "\":";
    out_ << c;
    fresh_ = true;
    return *this;
  }
  Json& close(char c) {
    out_ << c;
    fresh_ = false;
    return *this;
  }
  void sep() {
    if (!fresh_) out_ << ',';
    fresh_ = false;
  }

  std::ostringstream out_;
  bool fresh_ = true;
};

void write_verdict(Json& j, const std::string& key, const ConstancyVerdict& v) {
  j.obj_open(key)
      .field("constant", v.is_constant)
      .field("mean", v.mean)
      .field("residual", v.residual)
      .field("tolerance", v.tolerance)
      .obj_close();
}

void write_axis(Json& j, const std::string& key,
                const std::optional<classify::AxisEstimate>& axis) {
  if (!axis) return;
  j.obj_open(key);
  j.arr_open("mean_axis");
  for (int i = 0; i < 5; ++i) j.element(axis->mean_axis(i));
  j.arr_close();
  j.field("cos_angle", axis->cos_angle)
      .field("angle", axis->angle)
      .field("residual", axis->residual)
      .field("derivative_max", axis->derivative_max);
  j.obj_close();
}

}  // namespace

std::string report_to_json(const classify::HelixReport& report,
                           const ReportProvenance& provenance,
                           Eigen::Index samples) {
  Json j;
  j.obj_open();
  j.field("tool", std::string("pentahelix"));

  j.obj_open("input")
      .field("path", provenance.input_path)
      .field("fnv1a64", [&] {
        char buf[24];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(provenance.input_hash));
        return std::string(buf);
      }())
      .field("reparametrized", provenance.reparametrized)
      .field("samples", static_cast<long long>(samples))
      .field("step", report.step)
      .field("jets", std::string(to_string(report.provenance)))
      .field("tolerance", report.tolerance)
      .obj_close();

  j.obj_open("v1").field("pass", report.v1_pass);
  write_verdict(j, "F", report.v1_verdict);
  j.obj_open("ode")
      .field("pass", report.v1_ode.pass)
      .field("residual", report.v1_ode.integrated.residual)
      .field("differential_max", report.v1_ode.differential_max)
      .obj_close();
  j.obj_open("integral")
      .field("pass", report.v1_integral.pass)
      .field("A", report.v1_integral.A)
      .field("B", report.v1_integral.B)
      .field("residual", report.v1_integral.residual)
      .field("condition", report.v1_integral.condition)
      .obj_close();
  write_axis(j, "axis", report.v1_axis);
  j.obj_close();

  j.obj_open("v3").field("pass", report.v3.pass);
  write_verdict(j, "ratio21", report.v3.ratio21);
  write_verdict(j, "ratio34", report.v3.ratio34);
  write_axis(j, "axis", report.v3_axis);
  j.obj_close();

  j.obj_open("v5").field("pass", report.v5.pass);
  write_verdict(j, "G", report.v5.g_verdict);
  write_verdict(j, "integrated", report.v5.integrated);
  j.field("differential_max", report.v5.differential_max);
  write_axis(j, "axis", report.v5_axis);
  j.obj_close();

  j.obj_open("norm_ratios")
      .field("mismatch21", report.norm_ratios.mismatch21)
      .field("mismatch45", report.norm_ratios.mismatch45)
      .field("consistent_with_v3", report.norm_ratios.consistent_with_v3)
      .obj_close();

  j.obj_open("implication").field("applicable",
                                  report.implication_residual.has_value());
  if (report.implication_residual) {
    j.field("residual", *report.implication_residual);
  }
  j.obj_close();

  j.obj_open("nonexistence")
      .field("sigma_min_v2", report.nonexistence.sigma_min_v2)
      .field("sigma_min_v4", report.nonexistence.sigma_min_v4)
      .obj_close();

  j.field("k4_sign", report.k4_sign);
  j.obj_close();
  return j.str() + "\n";
}

std::string report_summary(const classify::HelixReport& report) {
  std::ostringstream out;
  const auto line = [&](const char* name, bool pass, double residual) {
    out << name << ' ' << (pass ? "true" : "false") << "  (residual "
        << format_number(residual) << ", tol " << format_number(report.tolerance)
        << ")\n";
  };
  line("v1", report.v1_pass, report.v1_verdict.residual);
  line("v3", report.v3.pass,
       std::max(report.v3.ratio21.residual, report.v3.ratio34.residual));
  line("v5", report.v5.pass,
       std::max(report.v5.g_verdict.residual, report.v5.integrated.residual));
  if (report.v1_axis) {
    out << "v1 axis cos_angle " << format_number(report.v1_axis->cos_angle) << "\n";
  }
  if (report.v3_axis) {
    out << "v3 axis cos_angle " << format_number(report.v3_axis->cos_angle) << "\n";
  }
  if (report.v5_axis) {
    out << "v5 axis cos_angle " << format_number(report.v5_axis->cos_angle) << "\n";
  }
  out << "nonexistence sigma_min v2 "
      << format_number(report.nonexistence.sigma_min_v2) << ", v4 "
      << format_number(report.nonexistence.sigma_min_v4) << "\n";
  return out.str();
}

std::vector<std::string> plot_series_names() {
  return {"k1",      "k2",      "k3",      "k4",     "ratio21",
          "ratio34", "ratio43", "F",       "G",      "v1f",
          "v5f",     "v1axis",  "v3axis",  "v5axis"};
}

std::string plot_table(const frenet::FrenetData& fd,
                       const classify::HelixReport& report,
                       const std::vector<std::string>& series) {
  const Eigen::Index n = fd.grid->size();
  std::vector<std::string> headers{"s"};
  std::vector<Eigen::ArrayXd> columns;
  columns.push_back(fd.grid->s());

  const auto push = [&](const std::string& name, Eigen::ArrayXd col) {
    headers.push_back(name);
    columns.push_back(std::move(col));
  };
  const auto push_axis = [&](const std::string& name,
                             const std::optional<classify::AxisEstimate>& axis) {
    if (!axis) {
      throw Error("SeriesUnavailable",
                  name + " requires the corresponding helix verdict to be positive");
    }
    for (int r = 0; r < 5; ++r) {
      push(name + "_" + std::to_string(r + 1),
           axis->axis_per_node.row(r).transpose().array());
    }
  };

  for (const auto& name : series) {
    if (name == "k1" || name == "k2" || name == "k3" || name == "k4") {
      push(name, fd.k(name[1] - '0').values);
    } else if (name == "ratio21") {
      push(name, fd.k(2).values / fd.k(1).values);
    } else if (name == "ratio34") {
      push(name, fd.k(3).values / fd.k(4).values.abs());
    } else if (name == "ratio43") {
      push(name, fd.k(4).values.abs() / fd.k(3).values);
    } else if (name == "F") {
      push(name, report.v1_functions.F.values);
    } else if (name == "G") {
      push(name, report.v5.functions.G.values);
    } else if (name == "v1f") {
      push(name, report.v1_functions.f.values);
    } else if (name == "v5f") {
      push(name, report.v5.functions.f.values);
    } else if (name == "v1axis") {
      push_axis(name, report.v1_axis);
    } else if (name == "v3axis") {
      push_axis(name, report.v3_axis);
    } else if (name == "v5axis") {
      push_axis(name, report.v5_axis);
    } else {
      std::string known;
      for (const auto& s : plot_series_names()) known += " " + s;
      throw ParseError("unknown series '" + name + "'; available:" + known);
    }
  }

  std::ostringstream out;
  out << '#';
  for (const auto& h : headers) out << ' ' << h;
  out << '\n';
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out << ' ';
      out << format_number(columns[c](i));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace pentahelix::io
