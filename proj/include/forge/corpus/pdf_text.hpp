#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace forge::corpus {

// Plain text of a PDF in page order. Line-break hyphenation is rejoined and
// whitespace runs collapse to single spaces. Handles uncompressed and
// Flate-compressed content streams, object streams and the standard text
// operators; glyph codes are read as Latin-1 (plus the OT1 ligature slots),
// so fonts with custom encodings may come out garbled.
// Throws ExtractionError for data that is not a readable PDF.
std::string extract_pdf_text(const std::filesystem::path& pdf_path);
std::string extract_pdf_text_from_bytes(std::string_view bytes);

}  // namespace forge::corpus
