#include "spandrop/jsonl.hpp"

#include <json.hpp>

namespace spandrop {

using ordered_json = nlohmann::ordered_json;

std::string to_json_line(const SequenceExample& ex) {
    ordered_json record;
    record["id"] = ex.id;

    ordered_json spans = ordered_json::array();
    for (const auto& span : ex.spans) spans.push_back(span.tokens);
    record["spans"] = std::move(spans);

    record["supporting"] = ex.supporting;

    if (ex.label.is_text())
        record["label"] = ex.label.text_value();
    else
        record["label"] = ex.label.number_value();

    if (ex.provenance) {
        record["source_id"] = ex.provenance->source_id;
        record["kept_indices"] = ex.provenance->kept_indices;
        if (ex.provenance->pi) record["pi"] = *ex.provenance->pi;
    }

    return record.dump();
}

SequenceExample parse_example(std::string_view line) {
    ordered_json record;
    try {
        record = ordered_json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonlError(std::string("bad JSON: ") + e.what());
    }
    if (!record.is_object()) throw JsonlError("record is not a JSON object");

    SequenceExample ex;

    const auto id_it = record.find("id");
    if (id_it == record.end() || !id_it->is_string())
        throw JsonlError("missing or non-string \"id\"");
    ex.id = id_it->get<std::string>();

    const auto spans_it = record.find("spans");
    if (spans_it == record.end() || !spans_it->is_array())
        throw JsonlError("missing or non-array \"spans\"");
    ex.spans.reserve(spans_it->size());
    for (const auto& tokens : *spans_it) {
        if (!tokens.is_array()) throw JsonlError("span is not an array of tokens");
        Span span;
        span.index = ex.spans.size();
        span.tokens.reserve(tokens.size());
        for (const auto& tok : tokens) {
            if (!tok.is_string()) throw JsonlError("token is not a string");
            span.tokens.push_back(tok.get<std::string>());
        }
        ex.spans.push_back(std::move(span));
    }

    if (const auto it = record.find("supporting"); it != record.end()) {
        if (!it->is_array()) throw JsonlError("\"supporting\" is not an array");
        for (const auto& v : *it) {
            if (!v.is_number_unsigned() && !v.is_number_integer())
                throw JsonlError("supporting index is not an integer");
            const auto raw = v.get<std::int64_t>();
            if (raw < 0) throw JsonlError("supporting index is negative");
            ex.supporting.push_back(static_cast<std::size_t>(raw));
        }
    }

    if (const auto it = record.find("label"); it != record.end()) {
        if (it->is_string())
            ex.label = Label::text(it->get<std::string>());
        else if (it->is_number_integer() || it->is_number_unsigned())
            ex.label = Label::number(it->get<std::int64_t>());
        else
            throw JsonlError("\"label\" is neither a string nor an integer");
    }

    const bool has_source = record.contains("source_id");
    const bool has_kept = record.contains("kept_indices");
    if (has_source || has_kept) {
        Provenance prov;
        if (has_source) {
            const auto& v = record["source_id"];
            if (!v.is_string()) throw JsonlError("\"source_id\" is not a string");
            prov.source_id = v.get<std::string>();
        }
        if (has_kept) {
            const auto& v = record["kept_indices"];
            if (!v.is_array()) throw JsonlError("\"kept_indices\" is not an array");
            for (const auto& idx : v) {
                if (!idx.is_number_unsigned() && !idx.is_number_integer())
                    throw JsonlError("kept index is not an integer");
                prov.kept_indices.push_back(idx.get<std::size_t>());
            }
        }
        if (const auto it = record.find("pi"); it != record.end()) {
            if (!it->is_number()) throw JsonlError("\"pi\" is not a number");
            prov.pi = it->get<double>();
        }
        ex.provenance = std::move(prov);
    }

    return ex;
}

}  // namespace spandrop
