"""Worker pool balancing."""

from workers import Scheduler, Worker


def pool_for_tags(tags, copies):
    sched = Scheduler()
    for tag in tags:
        for _ in range(copies):
            worker = Worker(tag)
            sched.add_worker(worker)
    return sched


def grow_pool(sched, tag, extra):
    for _ in range(extra):
        worker = Worker(tag)
        sched.add_worker(worker)
    return sched.worker_count()


def probe(sched, job):
    worker = sched.next_worker(job)
    if worker is None:
        return None
    return worker.tag


def coverage(sched, jobs):
    hits = 0
    for job in jobs:
        worker = sched.next_worker(job)
        if worker is not None:
            hits += 1
    if not jobs:
        return 1.0
    return hits / len(jobs)
