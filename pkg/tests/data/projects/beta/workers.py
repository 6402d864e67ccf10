"""Worker and scheduler types."""


class Worker:
    """Runs jobs matching its tag."""

    def __init__(self, tag):
        self.tag = tag
        self._done = 0

    def can_handle(self, job):
        return job.get("tag") == self.tag

    def run_job(self, job):
        self._done += 1
        return job.get("payload")

    def jobs_done(self):
        return self._done


class Scheduler:
    """Round-robin assignment of jobs to workers."""

    def __init__(self):
        self._workers = []
        self._next = 0

    def add_worker(self, worker):
        self._workers.append(worker)

    def worker_count(self):
        return len(self._workers)

    def next_worker(self, job):
        if not self._workers:
            return None
        for _ in range(len(self._workers)):
            worker = self._workers[self._next]
            self._next = (self._next + 1) % len(self._workers)
            if worker.can_handle(job):
                return worker
        return None


def make_job(name, tag, payload):
    return {"name": name, "tag": tag, "payload": payload}
