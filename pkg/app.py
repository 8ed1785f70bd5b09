import os

import uvicorn
from fastapi import FastAPI

from movcone.movcone import MovConeDashboard

app = FastAPI()

GRAPH_PATH = os.getenv("MOVCONE_GRAPH")
PORT = int(os.getenv("FASTAPI_PORT", 8000))
USERNAME = os.getenv("MOVCONE_USERNAME")
PASSWORD = os.getenv("MOVCONE_PASSWORD")

dashboard = MovConeDashboard(graph_path=GRAPH_PATH, prefix="/movcone", username=USERNAME, password=PASSWORD)

app.mount("/movcone", dashboard)

if __name__ == "__main__":
    uvicorn.run(app, host="0.0.0.0", port=PORT)
