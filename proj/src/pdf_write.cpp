#include <zlib.h>

#include <cstdio>
#include <sstream>

#include "mlar/pdf.hpp"
#include "mlar/util.hpp"

namespace mlar {

std::string zlib_deflate(std::string_view data) {
  uLongf bound = compressBound(static_cast<uLong>(data.size()));
  std::string out(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                reinterpret_cast<const Bytef*>(data.data()),
                static_cast<uLong>(data.size()), Z_BEST_SPEED) != Z_OK) {
    throw Error("pdf write failure", "deflate failed");
  }
  out.resize(bound);
  return out;
}

namespace {

std::string escape_pdf_string(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 4);
  for (char c : s) {
    if (c == '(' || c == ')' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string page_content(const std::vector<std::string>& lines) {
  std::ostringstream os;
  int y = 760;
  for (const auto& line : lines) {
    os << "BT /F1 11 Tf 72 " << y << " Td (" << escape_pdf_string(line)
       << ") Tj ET\n";
    y -= 14;
  }
  return os.str();
}

}  // namespace

std::string make_pdf(const std::vector<std::vector<std::string>>& pages,
                     bool compress) {
  const int page_count = static_cast<int>(pages.size());
  // Object layout: 1 catalog, 2 pages root, 3 font,
  // then per page: 4+2i page dict, 5+2i content stream.
  std::string body;
  std::vector<std::size_t> offsets;  // offset of object i+1
  auto add_object = [&](int num, const std::string& content) {
    offsets.push_back(body.size());
    body += std::to_string(num) + " 0 obj\n" + content + "\nendobj\n";
  };

  std::string kids;
  for (int i = 0; i < page_count; ++i) {
    if (i) kids += " ";
    kids += std::to_string(4 + 2 * i) + " 0 R";
  }

  std::string header = "%PDF-1.4\n%\xE2\xE3\xCF\xD3\n";
  add_object(1, "<< /Type /Catalog /Pages 2 0 R >>");
  add_object(2, "<< /Type /Pages /Kids [" + kids + "] /Count " +
                    std::to_string(page_count) + " >>");
  add_object(3,
             "<< /Type /Font /Subtype /Type1 /BaseFont /Helvetica >>");
  for (int i = 0; i < page_count; ++i) {
    const int page_num = 4 + 2 * i;
    const int content_num = 5 + 2 * i;
    add_object(page_num,
               "<< /Type /Page /Parent 2 0 R /MediaBox [0 0 612 792] "
               "/Resources << /Font << /F1 3 0 R >> >> /Contents " +
                   std::to_string(content_num) + " 0 R >>");
    std::string content = page_content(pages[i]);
    std::string filter;
    if (compress) {
      content = zlib_deflate(content);
      filter = " /Filter /FlateDecode";
    }
    add_object(content_num, "<< /Length " + std::to_string(content.size()) +
                                filter + " >>\nstream\n" + content +
                                "\nendstream");
  }

  const int total_objects = 3 + 2 * page_count;
  std::size_t xref_offset = header.size() + body.size();
  std::ostringstream xref;
  xref << "xref\n0 " << (total_objects + 1) << "\n";
  xref << "0000000000 65535 f \n";
  for (int i = 0; i < total_objects; ++i) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%010zu 00000 n \n",
                  header.size() + offsets[i]);
    xref << buf;
  }
  xref << "trailer\n<< /Size " << (total_objects + 1)
       << " /Root 1 0 R >>\nstartxref\n"
       << xref_offset << "\n%%EOF\n";

  return header + body + xref.str();
}

}  // namespace mlar
