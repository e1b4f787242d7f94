#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mlar {

// Extracts the text layer of a PDF: pages in page-tree order, one '\f'
// between pages, each page trimmed. Handles classic and incrementally
// updated files, FlateDecode/ASCIIHexDecode streams, object streams and
// the standard text-showing operators. Encrypted files and files without
// any text layer throw Error("no text").
std::string extract_pdf_text(std::string_view bytes);

// Builds a small single-font PDF, one vector of lines per page. Used by the
// synthetic corpus generator and the extractor tests. `compress` runs the
// content streams through FlateDecode.
std::string make_pdf(const std::vector<std::vector<std::string>>& pages,
                     bool compress = false);

// zlib helpers shared by the reader and writer.
std::string zlib_inflate(std::string_view data);
std::string zlib_deflate(std::string_view data);

}  // namespace mlar
