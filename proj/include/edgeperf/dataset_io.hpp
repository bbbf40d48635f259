// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgeperf/analysis.hpp"
#include "edgeperf/nas_graph.hpp"
#include "edgeperf/network.hpp"

namespace edgeperf::io
{

// Files ending in ".gz" are gzip-compressed; everything else is plain text.
bool is_gzip_path(const std::filesystem::path &path);

class LineReader
{
   public:
    explicit LineReader(const std::filesystem::path &path);
    ~LineReader();
    LineReader(LineReader &&) noexcept;
    LineReader &operator=(LineReader &&) noexcept;

    // Next line without its terminator; false at end of file.
    bool next(std::string &line);
    std::size_t line_number() const { return line_number_; }
    const std::filesystem::path &path() const { return path_; }

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::filesystem::path path_;
    std::size_t line_number_ = 0;
};

class LineWriter
{
   public:
    explicit LineWriter(const std::filesystem::path &path);
    ~LineWriter();
    LineWriter(LineWriter &&) noexcept;
    LineWriter &operator=(LineWriter &&) noexcept;

    // Appends `line` and a newline.
    void write(std::string_view line);
    void close();

   private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Cells: one JSON object per line,
//   {"hash": ..., "ops": [...], "adjacency": [[...]], "metadata": {...}}
// "hash" and "metadata" are optional on input; "hash" is always written.

struct CellMetadata
{
    std::optional<std::int64_t> trainable_parameters;
    std::optional<double> mean_validation_accuracy;

    bool empty() const { return !trainable_parameters && !mean_validation_accuracy; }
    bool operator==(const CellMetadata &) const = default;
};

struct CellRecord
{
    std::string hash;
    nas::CellGraph cell;
    CellMetadata metadata;
    std::size_t line = 0;  // source line when read from a file

    static CellRecord from_cell(const nas::CellGraph &cell);
};

std::string format_cell_line(const CellRecord &record);

// Throws Error with the line number on malformed JSON, invalid cells or a
// stored hash that disagrees with the recomputed one.
CellRecord parse_cell_line(std::string_view text, std::size_t line_number);

class CellReader
{
   public:
    explicit CellReader(const std::filesystem::path &path);
    bool next(CellRecord &record);

   private:
    LineReader lines_;
    std::string buffer_;
};

class CellWriter
{
   public:
    explicit CellWriter(const std::filesystem::path &path);
    void write(const CellRecord &record);
    void write(const nas::CellGraph &cell);
    void close() { lines_.close(); }
    std::size_t count() const { return count_; }

   private:
    LineWriter lines_;
    std::size_t count_ = 0;
};

std::vector<CellRecord> read_cells(const std::filesystem::path &path);
void write_cells(const std::filesystem::path &path, std::span<const CellRecord> records);
void write_cells(const std::filesystem::path &path, std::span<const nas::CellGraph> cells);

// A record whose externally supplied parameter count differs from our own.
struct ParamDiscrepancy
{
    std::string hash;
    std::size_t line = 0;
    std::int64_t stored = 0;
    std::int64_t computed = 0;
};

std::vector<ParamDiscrepancy> cross_check_params(std::span<const CellRecord> records,
                                                 const nas::NetworkSpec &spec = {});

// ---------------------------------------------------------------------------
// Results CSV.

inline constexpr std::array<std::string_view, 12> kResultColumns = {
    "cell_hash",
    "accel",
    "latency_ms",
    "energy_mj",
    "total_params",
    "total_macs",
    "depth",
    "width",
    "n_conv3x3",
    "n_conv1x1",
    "n_maxpool3x3",
    "bound_fraction_memory",
};

inline constexpr std::string_view kAccuracyColumn = "mean_validation_accuracy";

// Shortest "%.17g" rendering; parses back to the identical double.
std::string format_double(double value);

class ResultWriter
{
   public:
    ResultWriter(const std::filesystem::path &path, bool with_accuracy = false);
    void write(const analysis::ResultRow &row);
    void close() { lines_.close(); }

   private:
    LineWriter lines_;
    bool with_accuracy_;
    std::string buffer_;
};

class ResultReader
{
   public:
    explicit ResultReader(const std::filesystem::path &path);
    bool next(analysis::ResultRow &row);
    bool has_accuracy() const { return accuracy_index_ >= 0; }

   private:
    LineReader lines_;
    std::string buffer_;
    std::array<int, kResultColumns.size()> index_{};
    int accuracy_index_ = -1;
    std::size_t columns_ = 0;
    std::vector<std::string_view> fields_;
};

std::vector<analysis::ResultRow> read_results(const std::filesystem::path &path);
void write_results(const std::filesystem::path &path, std::span<const analysis::ResultRow> rows);

}  // namespace edgeperf::io
