#include "relo/csv.hpp"

#include <cinttypes>
#include <cstdlib>
#include <stdexcept>

namespace relo::csv {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

std::string fmt(double x, int decimals) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, x);
    return buf;
}

Writer::Writer(const std::filesystem::path& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path.string());
}

void Writer::row(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void Writer::raw_line(const std::string& line) { out_ << line << '\n'; }

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first) {
            first = false;
            // header detection: a first field that does not parse as a number
            char* end = nullptr;
            std::strtod(line.c_str(), &end);
            if (end == line.c_str()) continue;
        }
        rows.push_back(split_line(line));
    }
    return rows;
}

void write_tensor(const std::filesystem::path& path, const Tensor3& t, const std::string& value_name) {
    Writer w(path);
    w.raw_line("i,j,t," + value_name);
    for (int i = 0; i < t.n1; ++i)
        for (int j = 0; j < t.n2; ++j)
            for (int k = 0; k < t.n3; ++k) {
                const double x = t.at(i, j, k);
                if (x == 0.0) continue;  // long format: omit zeros
                w.row({std::to_string(i), std::to_string(j), std::to_string(k + 1), fmt(x)});
            }
}

MaskedTensor3 read_tensor(const std::filesystem::path& path, int n1, int n2, int n3) {
    MaskedTensor3 t(n1, n2, n3);
    for (const auto& r : read_rows(path)) {
        if (r.size() != 4) throw std::runtime_error("tensor csv: expected 4 fields in " + path.string());
        const int i = std::stoi(r[0]), j = std::stoi(r[1]), k = std::stoi(r[2]);
        if (i < 0 || i >= n1 || j < 0 || j >= n2 || k < 1 || k > n3)
            throw std::runtime_error("tensor csv: index out of range in " + path.string());
        t.set(i, j, k - 1, std::stod(r[3]));
    }
    return t;
}

void write_matrix_long(const std::filesystem::path& path, const Matrix& m, const std::string& value_name) {
    Writer w(path);
    w.raw_line("i,t," + value_name);
    for (int i = 0; i < m.rows; ++i)
        for (int t = 0; t < m.cols; ++t) {
            const double x = m.at(i, t);
            if (x == 0.0) continue;
            w.row({std::to_string(i), std::to_string(t + 1), fmt(x)});
        }
}

Matrix read_matrix_long(const std::filesystem::path& path, int rows, int cols) {
    Matrix m(rows, cols, 0.0);
    for (const auto& r : read_rows(path)) {
        if (r.size() != 3) throw std::runtime_error("matrix csv: expected 3 fields in " + path.string());
        const int i = std::stoi(r[0]), t = std::stoi(r[1]);
        if (i < 0 || i >= rows || t < 1 || t > cols)
            throw std::runtime_error("matrix csv: index out of range in " + path.string());
        m.at(i, t - 1) = std::stod(r[2]);
    }
    return m;
}

}  // namespace relo::csv
