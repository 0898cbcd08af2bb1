#pragma once

// JSON documents for diagrams, systems, maps, elements and certificates.
// Readers throw FormatError naming the offending key path ("/edges/0/1").

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "bratteli/diagram.hpp"
#include "bratteli/interpolation.hpp"
#include "bratteli/maps.hpp"
#include "bratteli/system.hpp"

namespace bratteli::io {

using Json = nlohmann::ordered_json;

/// Parses a file; FormatError("", ...) when the text is not JSON.
Json read_file(const std::string& path);
Json parse_text(const std::string& text);

Json to_json(const BratteliDiagram& d);
BratteliDiagram diagram_from_json(const Json& j);

Json to_json(const Generator& g);
Generator generator_from_json(const Json& j, const std::string& path = "");

/// A diagram document with an optional "generator" key; generators win.
DirectSystem system_from_document(const Json& j);

/// Explicit levels and embeddings (or the generator descriptor when extensible).
Json to_json(const DirectSystem& s);
DirectSystem system_from_json(const Json& j);

Json to_json(const Algebra& a);
Algebra algebra_from_json(const Json& j, const std::string& path = "");

Json to_json(const MatrixUnitHom& h);
MatrixUnitHom hom_from_json(const Json& j, const std::string& path = "");

Json to_json(const CompressionMap& m);
CompressionMap compression_from_json(const Json& j, const std::string& path = "");

/// Entries as [row, col, "p/q"].
Json to_json(const Element& x);
Element element_from_json(const Json& j, const std::string& path = "");

Json to_json(const CheckRecord& r);
CheckRecord record_from_json(const Json& j, const std::string& path = "");
Json to_json(const VerificationReport& r);
/// One compact JSON object per record, newline separated.
void write_jsonl(std::ostream& out, const VerificationReport& r);

Json to_json(const InterpolationCertificate& c);
InterpolationCertificate certificate_from_json(const Json& j);

}  // namespace bratteli::io
