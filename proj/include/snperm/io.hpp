#pragma once

#include <string>
#include <vector>

#include "snperm/core.hpp"
#include "snperm/model.hpp"

namespace snperm::io {

enum class MatrixFormat { auto_detect, matrix_market, matrix_market_array, csv, binary01 };

MatrixFormat format_from_name(const std::string& name);  // "mm", "mm-array", "csv", "bin01"
std::string format_name(MatrixFormat f);

// Dense matrix I/O. MatrixMarket coordinate ("matrix coordinate real
// general|symmetric") and array formats, comma-separated dense rows, and a
// whitespace-separated 0/1 text format with a "rows cols" header line.
Mat read_matrix(const std::string& path, MatrixFormat format = MatrixFormat::auto_detect);
void write_matrix(const std::string& path, const Mat& m, MatrixFormat format);

std::string matrix_to_string(const Mat& m, MatrixFormat format);
Mat matrix_from_string(const std::string& text, MatrixFormat format = MatrixFormat::auto_detect);

// One line: n space-separated 1-based ranks.
PermutationVec read_permutation(const std::string& path);
void write_permutation(const std::string& path, const PermutationVec& p);

// Lines "i j gap" with 1-based positions; '#' starts a comment.
model::SideConstraints read_constraints(const std::string& path);
void write_constraints(const std::string& path, const model::SideConstraints& side);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace snperm::io
