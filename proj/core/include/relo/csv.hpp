#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "relo/tensor.hpp"

namespace relo::csv {

// Formats doubles with enough digits to round-trip while keeping output
// byte-stable between runs.
std::string fmt(double x);
std::string fmt(double x, int decimals);

class Writer {
public:
    explicit Writer(const std::filesystem::path& path);
    void row(const std::vector<std::string>& fields);
    void raw_line(const std::string& line);

private:
    std::ofstream out_;
};

// Parses a CSV line into fields (no quoting; our formats never need it).
std::vector<std::string> split_line(const std::string& line, char sep = ',');

// Reads all data rows, skipping the first line when it matches `header`.
std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path);

// Long-format tensor files.
// i,j,t,value rows; t is 1-based in the file.
void write_tensor(const std::filesystem::path& path, const Tensor3& t, const std::string& value_name);
MaskedTensor3 read_tensor(const std::filesystem::path& path, int n1, int n2, int n3);

// i,t,value rows (N x P matrices, e.g. activity).
void write_matrix_long(const std::filesystem::path& path, const Matrix& m, const std::string& value_name);
Matrix read_matrix_long(const std::filesystem::path& path, int rows, int cols);

}  // namespace relo::csv
