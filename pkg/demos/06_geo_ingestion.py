"""
From latitude/longitude to metres
=================================

Site coordinates arrive as lat/lon; the solvers work in planar metres. An
equirectangular projection about a reference point is plenty at city scale.
"""

import tempfile
from pathlib import Path

from agco.scenario import GeoRecord, GeoValidationError, ingest_geo, read_geo_csv

csv_text = """lat,lon,timestamp,site_id
5.3364,-4.0267,2013-01-07T08:00,plateau
5.3600,-3.9800,2013-01-07T08:05,cocody
5.2900,-4.0000,2013-01-07T08:10,marcory
"""
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "sites.csv"
    path.write_text(csv_text, encoding="utf-8")
    records = read_geo_csv(path)

for rec, pos in zip(records, ingest_geo(records, reference=records[0])):
    print(f"{rec.site_id:>8}: x {pos.x:8.1f} m, y {pos.y:8.1f} m")

# Bad rows are reported with their row number.
try:
    ingest_geo([GeoRecord(5.3, -4.0), GeoRecord(95.0, 0.0)], GeoRecord(5.3, -4.0))
except GeoValidationError as err:
    print("rejected:", err)
