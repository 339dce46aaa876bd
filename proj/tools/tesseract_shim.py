#!/usr/bin/env python3
# Copyright 2026 The parlagest Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Stand-in for the tesseract command line built on tesserocr.

Usage: tesseract_shim.py IMAGE OUTBASE [-l LANG] [--psm N] [--tessdata-dir DIR]

Writes the recognized text to OUTBASE.txt, like `tesseract IMAGE OUTBASE`.
"""

import argparse
import os
import sys

CANDIDATE_TESSDATA = (
    "/usr/local/share/tessdata",
    "/usr/share/tesseract-ocr/5/tessdata",
    "/usr/share/tesseract-ocr/4.00/tessdata",
    "/usr/share/tessdata",
)


def find_tessdata(lang, explicit):
    dirs = [explicit] if explicit else []
    if os.environ.get("TESSDATA_PREFIX"):
        dirs.append(os.environ["TESSDATA_PREFIX"])
    dirs.extend(CANDIDATE_TESSDATA)
    for d in dirs:
        if d and all(os.path.isfile(os.path.join(d, part + ".traineddata")) for part in lang.split("+")):
            return d
    return None


def main(argv):
    parser = argparse.ArgumentParser(add_help=True)
    parser.add_argument("image")
    parser.add_argument("outbase")
    parser.add_argument("-l", dest="lang", default="eng")
    parser.add_argument("--psm", type=int, default=None)
    parser.add_argument("--tessdata-dir", dest="tessdata", default=None)
    args = parser.parse_args(argv)

    try:
        import tesserocr
        from PIL import Image
    except ImportError as exc:
        print(f"tesseract_shim: {exc}", file=sys.stderr)
        return 2

    tessdata = find_tessdata(args.lang, args.tessdata)
    if tessdata is None:
        print(f"tesseract_shim: no traineddata for language '{args.lang}'", file=sys.stderr)
        return 1

    psm = tesserocr.PSM.AUTO if args.psm is None else tesserocr.PSM(args.psm)
    try:
        with tesserocr.PyTessBaseAPI(path=tessdata.rstrip("/") + "/", lang=args.lang, psm=psm) as api:
            with Image.open(args.image) as img:
                api.SetImage(img)
                text = api.GetUTF8Text()
    except Exception as exc:  # tesserocr raises RuntimeError for init failures
        print(f"tesseract_shim: {exc}", file=sys.stderr)
        return 1

    with open(args.outbase + ".txt", "w", encoding="utf-8") as out:
        out.write(text)
        out.write("\f")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
