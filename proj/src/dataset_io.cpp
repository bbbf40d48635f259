// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/dataset_io.hpp"

#include <zlib.h>

#include <cerrno>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "json.hpp"

#include "edgeperf/error.hpp"

namespace edgeperf::io
{

bool is_gzip_path(const std::filesystem::path &path) { return path.extension() == ".gz"; }

// gzopen reads uncompressed files transparently, so one reader covers both.
struct LineReader::Impl
{
    gzFile file = nullptr;
    std::vector<char> chunk = std::vector<char>(1 << 16);

    ~Impl()
    {
        if (file) gzclose(file);
    }
};

LineReader::LineReader(const std::filesystem::path &path) : impl_(std::make_unique<Impl>()), path_(path)
{
    if (!std::filesystem::is_regular_file(path)) throw Error("no such file: " + path.string());
    impl_->file = gzopen(path.c_str(), "rb");
    if (!impl_->file) throw Error("cannot open " + path.string());
    gzbuffer(impl_->file, 1 << 17);
}

LineReader::~LineReader() = default;
LineReader::LineReader(LineReader &&) noexcept = default;
LineReader &LineReader::operator=(LineReader &&) noexcept = default;

bool LineReader::next(std::string &line)
{
    line.clear();
    bool any = false;
    auto &chunk = impl_->chunk;
    while (gzgets(impl_->file, chunk.data(), static_cast<int>(chunk.size())))
    {
        any = true;
        const std::size_t len = std::strlen(chunk.data());
        if (len > 0 && chunk[len - 1] == '\n')
        {
            line.append(chunk.data(), len - 1);
            break;
        }
        line.append(chunk.data(), len);
    }
    if (!any)
    {
        int err = Z_OK;
        const char *msg = gzerror(impl_->file, &err);
        if (err != Z_OK && err != Z_STREAM_END) throw Error("read error in " + path_.string() + ": " + msg);
        return false;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_number_;
    return true;
}

struct LineWriter::Impl
{
    gzFile gz = nullptr;
    std::FILE *plain = nullptr;

    void close(const std::filesystem::path &path)
    {
        if (gz)
        {
            const int rc = gzclose(gz);
            gz = nullptr;
            if (rc != Z_OK) throw Error("failed to finish " + path.string());
        }
        if (plain)
        {
            const int rc = std::fclose(plain);
            plain = nullptr;
            if (rc != 0) throw Error("failed to finish " + path.string());
        }
    }

    ~Impl()
    {
        if (gz) gzclose(gz);
        if (plain) std::fclose(plain);
    }
};

LineWriter::LineWriter(const std::filesystem::path &path) : impl_(std::make_unique<Impl>()), path_(path)
{
    if (is_gzip_path(path))
        impl_->gz = gzopen(path.c_str(), "wb6");
    else
        impl_->plain = std::fopen(path.c_str(), "wb");
    if (!impl_->gz && !impl_->plain) throw Error("cannot write " + path.string() + ": " + std::strerror(errno));
}

LineWriter::~LineWriter() = default;
LineWriter::LineWriter(LineWriter &&) noexcept = default;
LineWriter &LineWriter::operator=(LineWriter &&) noexcept = default;

void LineWriter::write(std::string_view line)
{
    if (impl_->gz)
    {
        if ((!line.empty() && gzwrite(impl_->gz, line.data(), static_cast<unsigned>(line.size())) == 0) ||
            gzputc(impl_->gz, '\n') == -1)
            throw Error("write error in " + path_.string());
    }
    else if (impl_->plain)
    {
        if (std::fwrite(line.data(), 1, line.size(), impl_->plain) != line.size() || std::fputc('\n', impl_->plain) == EOF)
            throw Error("write error in " + path_.string());
    }
    else
    {
        throw Error("write to closed file " + path_.string());
    }
}

void LineWriter::close() { impl_->close(path_); }

// ---------------------------------------------------------------------------

CellRecord CellRecord::from_cell(const nas::CellGraph &cell)
{
    CellRecord r;
    r.hash = nas::canonical_hash(cell);
    r.cell = cell;
    return r;
}

std::string format_cell_line(const CellRecord &record)
{
    nlohmann::json ops = nlohmann::json::array();
    for (auto op : record.cell.ops()) ops.push_back(nas::to_string(op));
    nlohmann::ordered_json j;
    j["hash"] = record.hash.empty() ? nas::canonical_hash(record.cell) : record.hash;
    j["ops"] = ops;
    j["adjacency"] = record.cell.adjacency_matrix();
    if (!record.metadata.empty())
    {
        nlohmann::ordered_json meta = nlohmann::ordered_json::object();
        if (record.metadata.trainable_parameters) meta["trainable_parameters"] = *record.metadata.trainable_parameters;
        if (record.metadata.mean_validation_accuracy)
            meta["mean_validation_accuracy"] = *record.metadata.mean_validation_accuracy;
        j["metadata"] = meta;
    }
    return j.dump();
}

CellRecord parse_cell_line(std::string_view text, std::size_t line_number)
{
    const std::string where = "line " + std::to_string(line_number);
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(text);
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(where + ": malformed JSON: " + e.what());
    }

    CellRecord record;
    record.line = line_number;
    try
    {
        if (!j.is_object()) throw Error(where + ": expected a JSON object");
        std::vector<nas::OperationKind> ops;
        for (const auto &name : j.at("ops")) ops.push_back(nas::parse_operation(name.get<std::string>()));
        const auto adjacency = j.at("adjacency").get<std::vector<std::vector<int>>>();
        record.cell = nas::CellGraph(std::move(ops), adjacency);
        if (j.contains("metadata"))
        {
            const auto &meta = j.at("metadata");
            if (meta.contains("trainable_parameters"))
                record.metadata.trainable_parameters = meta.at("trainable_parameters").get<std::int64_t>();
            if (meta.contains("mean_validation_accuracy"))
                record.metadata.mean_validation_accuracy = meta.at("mean_validation_accuracy").get<double>();
        }
        if (j.contains("hash")) record.hash = j.at("hash").get<std::string>();
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(where + ": " + e.what());
    }
    catch (const Error &e)
    {
        if (std::string_view(e.what()).starts_with("line ")) throw;
        throw Error(where + ": " + e.what());
    }

    const auto report = nas::validate_cell(record.cell);
    if (!report.ok)
    {
        std::string msg = where + ": invalid cell:";
        for (auto v : report.violations) msg += " " + std::string(nas::to_string(v)) + ";";
        throw Error(msg);
    }
    const std::string computed = nas::canonical_hash(record.cell);
    if (record.hash.empty())
        record.hash = computed;
    else if (record.hash != computed)
        throw Error(where + ": hash mismatch for record '" + record.hash + "' (recomputed " + computed + ")");
    return record;
}

CellReader::CellReader(const std::filesystem::path &path) : lines_(path) {}

bool CellReader::next(CellRecord &record)
{
    while (lines_.next(buffer_))
    {
        if (buffer_.find_first_not_of(" \t") == std::string::npos) continue;
        try
        {
            record = parse_cell_line(buffer_, lines_.line_number());
        }
        catch (const Error &e)
        {
            throw Error(lines_.path().string() + ": " + e.what());
        }
        return true;
    }
    return false;
}

CellWriter::CellWriter(const std::filesystem::path &path) : lines_(path) {}

void CellWriter::write(const CellRecord &record)
{
    lines_.write(format_cell_line(record));
    ++count_;
}

void CellWriter::write(const nas::CellGraph &cell) { write(CellRecord::from_cell(cell)); }

std::vector<CellRecord> read_cells(const std::filesystem::path &path)
{
    std::vector<CellRecord> out;
    CellReader reader(path);
    CellRecord r;
    while (reader.next(r)) out.push_back(std::move(r));
    return out;
}

void write_cells(const std::filesystem::path &path, std::span<const CellRecord> records)
{
    CellWriter w(path);
    for (const auto &r : records) w.write(r);
    w.close();
}

void write_cells(const std::filesystem::path &path, std::span<const nas::CellGraph> cells)
{
    CellWriter w(path);
    for (const auto &c : cells) w.write(c);
    w.close();
}

std::vector<ParamDiscrepancy> cross_check_params(std::span<const CellRecord> records, const nas::NetworkSpec &spec)
{
    std::vector<ParamDiscrepancy> out;
    for (const auto &r : records)
    {
        if (!r.metadata.trainable_parameters) continue;
        const auto computed = nas::expand_network(r.cell, spec).total_params;
        if (computed != *r.metadata.trainable_parameters)
            out.push_back({r.hash, r.line, *r.metadata.trainable_parameters, computed});
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string format_double(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace
{

void check_field(const std::string &text, const char *what)
{
    if (text.find_first_of(",\n\r\"") != std::string::npos)
        throw Error(std::string(what) + " '" + text + "' cannot be written to CSV");
}

void split(std::string_view line, std::vector<std::string_view> &fields)
{
    fields.clear();
    std::size_t start = 0;
    while (true)
    {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos)
        {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(std::string_view s, std::string_view column, std::size_t line)
{
    const std::string text(s);
    char *end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    // ERANGE on underflow still yields the nearest subnormal; only overflow is an error.
    if (text.empty() || end != text.c_str() + text.size() || (errno == ERANGE && std::isinf(v)))
        throw Error("line " + std::to_string(line) + ": bad number '" + text + "' in column " + std::string(column));
    return v;
}

template <class Int>
Int parse_int(std::string_view s, std::string_view column, std::size_t line)
{
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw Error("line " + std::to_string(line) + ": bad integer '" + std::string(s) + "' in column " +
                    std::string(column));
    return v;
}

}  // namespace

ResultWriter::ResultWriter(const std::filesystem::path &path, bool with_accuracy)
    : lines_(path), with_accuracy_(with_accuracy)
{
    std::string header;
    for (auto c : kResultColumns)
    {
        if (!header.empty()) header += ',';
        header += c;
    }
    if (with_accuracy_) header += "," + std::string(kAccuracyColumn);
    lines_.write(header);
}

void ResultWriter::write(const analysis::ResultRow &r)
{
    check_field(r.cell_hash, "cell hash");
    check_field(r.accel, "accelerator name");
    auto &b = buffer_;
    b.clear();
    b += r.cell_hash;
    b += ',';
    b += r.accel;
    for (double v : {r.latency_ms, r.energy_mj})
    {
        b += ',';
        b += format_double(v);
    }
    for (std::int64_t v : {r.total_params,
                           r.total_macs,
                           std::int64_t{r.depth},
                           std::int64_t{r.width},
                           std::int64_t{r.n_conv3x3},
                           std::int64_t{r.n_conv1x1},
                           std::int64_t{r.n_maxpool3x3}})
    {
        b += ',';
        b += std::to_string(v);
    }
    b += ',';
    b += format_double(r.bound_fraction_memory);
    if (with_accuracy_)
    {
        b += ',';
        if (r.mean_validation_accuracy) b += format_double(*r.mean_validation_accuracy);
    }
    lines_.write(b);
}

ResultReader::ResultReader(const std::filesystem::path &path) : lines_(path)
{
    if (!lines_.next(buffer_)) throw Error(path.string() + ": empty results file (missing header)");
    split(buffer_, fields_);
    columns_ = fields_.size();
    index_.fill(-1);
    for (std::size_t i = 0; i < fields_.size(); ++i)
    {
        bool known = false;
        for (std::size_t c = 0; c < kResultColumns.size(); ++c)
            if (fields_[i] == kResultColumns[c])
            {
                if (index_[c] >= 0) throw Error(path.string() + ": duplicate column " + std::string(fields_[i]));
                index_[c] = static_cast<int>(i);
                known = true;
            }
        if (fields_[i] == kAccuracyColumn)
        {
            accuracy_index_ = static_cast<int>(i);
            known = true;
        }
        if (!known) throw Error(path.string() + ": unexpected column " + std::string(fields_[i]));
    }
    for (std::size_t c = 0; c < kResultColumns.size(); ++c)
        if (index_[c] < 0) throw Error(path.string() + ": missing column " + std::string(kResultColumns[c]));
}

bool ResultReader::next(analysis::ResultRow &r)
{
    while (lines_.next(buffer_))
    {
        if (buffer_.empty()) continue;
        const std::size_t line = lines_.line_number();
        split(buffer_, fields_);
        if (fields_.size() != columns_)
            throw Error(lines_.path().string() + ": line " + std::to_string(line) + ": expected " +
                        std::to_string(columns_) + " fields, found " + std::to_string(fields_.size()));
        auto f = [&](std::size_t c) { return fields_[static_cast<std::size_t>(index_[c])]; };
        try
        {
            r.cell_hash = std::string(f(0));
            r.accel = std::string(f(1));
            r.latency_ms = parse_double(f(2), kResultColumns[2], line);
            r.energy_mj = parse_double(f(3), kResultColumns[3], line);
            r.total_params = parse_int<std::int64_t>(f(4), kResultColumns[4], line);
            r.total_macs = parse_int<std::int64_t>(f(5), kResultColumns[5], line);
            r.depth = parse_int<int>(f(6), kResultColumns[6], line);
            r.width = parse_int<int>(f(7), kResultColumns[7], line);
            r.n_conv3x3 = parse_int<int>(f(8), kResultColumns[8], line);
            r.n_conv1x1 = parse_int<int>(f(9), kResultColumns[9], line);
            r.n_maxpool3x3 = parse_int<int>(f(10), kResultColumns[10], line);
            r.bound_fraction_memory = parse_double(f(11), kResultColumns[11], line);
            r.mean_validation_accuracy.reset();
            if (accuracy_index_ >= 0)
            {
                const auto acc = fields_[static_cast<std::size_t>(accuracy_index_)];
                if (!acc.empty()) r.mean_validation_accuracy = parse_double(acc, kAccuracyColumn, line);
            }
        }
        catch (const Error &e)
        {
            throw Error(lines_.path().string() + ": " + e.what());
        }
        if (r.cell_hash.empty()) throw Error(lines_.path().string() + ": line " + std::to_string(line) + ": empty cell_hash");
        return true;
    }
    return false;
}

std::vector<analysis::ResultRow> read_results(const std::filesystem::path &path)
{
    std::vector<analysis::ResultRow> rows;
    ResultReader reader(path);
    analysis::ResultRow r;
    while (reader.next(r)) rows.push_back(r);
    return rows;
}

void write_results(const std::filesystem::path &path, std::span<const analysis::ResultRow> rows)
{
    bool accuracy = false;
    for (const auto &r : rows) accuracy = accuracy || r.mean_validation_accuracy.has_value();
    ResultWriter w(path, accuracy);
    for (const auto &r : rows) w.write(r);
    w.close();
}

}  // namespace edgeperf::io
