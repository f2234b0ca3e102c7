#include "mixedsel/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mixedsel/errors.hpp"

namespace mixedsel {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& field, std::size_t line_no, const std::string& col) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc{} || res.ptr != end || field.empty()) {
        throw ParseError("line " + std::to_string(line_no) + ", column '" + col +
                         "': cannot parse '" + field + "' as a number");
    }
    return value;
}

struct RawGroup {
    std::vector<double> target;
    std::vector<double> obs_std;
    std::vector<double> fixed;   // row-major, n x p
    std::vector<double> random;  // row-major, n x q
};

}  // namespace

LMEProblem read_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("'" + path + "': missing header row");
    const std::vector<std::string> header = split_csv_line(line);

    int group_col = -1;
    int target_col = -1;
    int obs_std_col = -1;
    std::vector<int> fixed_cols;
    std::vector<int> random_cols;
    std::vector<std::string> fixed_names;
    std::vector<std::string> random_names;
    for (std::size_t j = 0; j < header.size(); ++j) {
        const std::string& name = header[j];
        if (name == schema.group) {
            group_col = static_cast<int>(j);
        } else if (name == schema.target) {
            target_col = static_cast<int>(j);
        } else if (name == schema.obs_std) {
            obs_std_col = static_cast<int>(j);
        } else if (name.rfind(schema.fixed_prefix, 0) == 0) {
            fixed_cols.push_back(static_cast<int>(j));
            fixed_names.push_back(name);
        } else if (name.rfind(schema.random_prefix, 0) == 0) {
            random_cols.push_back(static_cast<int>(j));
            random_names.push_back(name);
        }
    }
    if (group_col < 0) throw SchemaError("'" + path + "': missing column '" + schema.group + "'");
    if (target_col < 0) throw SchemaError("'" + path + "': missing column '" + schema.target + "'");
    if (fixed_cols.empty()) {
        throw SchemaError("'" + path + "': no fixed covariate columns with prefix '" +
                          schema.fixed_prefix + "'");
    }
    if (random_cols.empty()) {
        throw SchemaError("'" + path + "': no random covariate columns with prefix '" +
                          schema.random_prefix + "'");
    }

    const std::size_t p = fixed_cols.size();
    const std::size_t q = random_cols.size();

    // Group labels map to indices by first appearance.
    std::vector<RawGroup> raw;
    std::map<std::string, std::size_t> label_index;
    std::vector<std::string> label_order;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        const std::string& label = fields[static_cast<std::size_t>(group_col)];
        auto [it, inserted] = label_index.try_emplace(label, raw.size());
        if (inserted) {
            raw.emplace_back();
            label_order.push_back(label);
        }
        RawGroup& g = raw[it->second];

        g.target.push_back(parse_double(fields[static_cast<std::size_t>(target_col)], line_no,
                                        schema.target));
        double std_dev = 1.0;
        if (obs_std_col >= 0) {
            std_dev = parse_double(fields[static_cast<std::size_t>(obs_std_col)], line_no,
                                   schema.obs_std);
            if (!(std_dev > 0.0)) {
                throw ParseError("line " + std::to_string(line_no) + ", column '" +
                                 schema.obs_std + "': must be > 0");
            }
        }
        g.obs_std.push_back(std_dev);
        for (std::size_t j = 0; j < p; ++j) {
            g.fixed.push_back(parse_double(fields[static_cast<std::size_t>(fixed_cols[j])],
                                           line_no, fixed_names[j]));
        }
        for (std::size_t j = 0; j < q; ++j) {
            g.random.push_back(parse_double(fields[static_cast<std::size_t>(random_cols[j])],
                                            line_no, random_names[j]));
        }
    }
    if (raw.empty()) throw SchemaError("'" + path + "': no data rows");

    std::vector<GroupBlock> groups;
    groups.reserve(raw.size());
    for (const RawGroup& g : raw) {
        const Eigen::Index n = static_cast<Eigen::Index>(g.target.size());
        Eigen::MatrixXd x(n, static_cast<Eigen::Index>(p));
        Eigen::MatrixXd z(n, static_cast<Eigen::Index>(q));
        Eigen::VectorXd y(n);
        Eigen::VectorXd var(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y[i] = g.target[static_cast<std::size_t>(i)];
            const double sd = g.obs_std[static_cast<std::size_t>(i)];
            var[i] = sd * sd;
            for (std::size_t j = 0; j < p; ++j) {
                x(i, static_cast<Eigen::Index>(j)) = g.fixed[static_cast<std::size_t>(i) * p + j];
            }
            for (std::size_t j = 0; j < q; ++j) {
                z(i, static_cast<Eigen::Index>(j)) = g.random[static_cast<std::size_t>(i) * q + j];
            }
        }
        groups.emplace_back(std::move(x), std::move(z), std::move(y), std::move(var));
    }
    return LMEProblem(std::move(groups), std::move(fixed_names), std::move(random_names));
}

void write_csv(const LMEProblem& problem, const std::string& path, const CsvSchema& schema) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");

    out << schema.group << ',' << schema.target << ',' << schema.obs_std;
    for (const auto& name : problem.fixed_names()) out << ',' << name;
    for (const auto& name : problem.random_names()) out << ',' << name;
    out << '\n';

    char buf[32];
    auto emit = [&](double value) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        out << ',' << buf;
    };

    for (Eigen::Index gi = 0; gi < problem.n_groups(); ++gi) {
        const GroupBlock& g = problem.group(gi);
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            out << (gi + 1);
            emit(g.y[i]);
            emit(std::sqrt(g.obs_var[i]));
            for (Eigen::Index j = 0; j < g.x_fixed.cols(); ++j) emit(g.x_fixed(i, j));
            for (Eigen::Index j = 0; j < g.z_random.cols(); ++j) emit(g.z_random(i, j));
            out << '\n';
        }
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

}  // namespace mixedsel
